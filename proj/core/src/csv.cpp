#include "modelcmp/csv.hpp"

#include <sstream>

#include "modelcmp/errors.hpp"

namespace modelcmp::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  int c = in_.peek();
  if (c == std::char_traits<char>::eof()) return false;
  record_line_ = line_;

  std::string field;
  bool in_quotes = false;
  bool saw_any = false;

  while (true) {
    c = in_.get();
    if (c == std::char_traits<char>::eof()) {
      if (in_quotes)
        throw ValidationError("CSV: unterminated quoted field starting near line " +
                              std::to_string(record_line_));
      if (saw_any || !field.empty() || !fields.empty()) fields.push_back(field);
      return !fields.empty();
    }
    saw_any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in_.peek() == '"') {
          field.push_back('"');
          in_.get();
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line_;
        field.push_back(static_cast<char>(c));
      }
    } else if (c == '"' && field.empty()) {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c == '\r') {
      if (in_.peek() == '\n') in_.get();
      ++line_;
      fields.push_back(field);
      return true;
    } else if (c == '\n') {
      ++line_;
      fields.push_back(field);
      return true;
    } else {
      field.push_back(static_cast<char>(c));
    }
  }
}

std::string escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  return out;
}

}  // namespace modelcmp::csv
