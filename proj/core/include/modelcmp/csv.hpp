#ifndef MODELCMP_CSV_HPP
#define MODELCMP_CSV_HPP

#include <istream>
#include <string>
#include <vector>

namespace modelcmp::csv {

/// Minimal RFC 4180 reader: comma-separated, double-quote quoting with
/// "" escapes, quoted fields may contain commas and newlines. CRLF and LF
/// line endings both accepted.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  /// Throws ValidationError on an unterminated quoted field.
  bool next(std::vector<std::string>& fields);

  /// 1-based line number of the record last returned by next().
  std::size_t record_line() const { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

/// Quotes a field if it contains a comma, quote, or newline.
std::string escape(const std::string& field);

/// Joins fields into a single CSV record (no trailing newline).
std::string join(const std::vector<std::string>& fields);

}  // namespace modelcmp::csv

#endif
