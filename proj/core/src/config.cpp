#include "modelcmp/config.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "modelcmp/errors.hpp"

namespace modelcmp {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, sep)) parts.push_back(part);
  return parts;
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("config: bad numeric value for " + key + ": \"" + value + "\"");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw ConfigError("config: bad integer value for " + key + ": \"" + value + "\"");
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.push_back(sep);
    out += parts[i];
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("alpha must be inside (0,1), got " + format_double(alpha));
  if (!(rope > 0.0 && rope < 1.0))
    throw ConfigError("rope must be inside (0,1), got " + format_double(rope));
  if (!(threshold > 0.5 && threshold <= 1.0))
    throw ConfigError("threshold must be inside (0.5,1], got " + format_double(threshold));
  if (rho && !(*rho > 0.0 && *rho <= 1.0))
    throw ConfigError("rho must be inside (0,1], got " + format_double(*rho));
  if (cv_train_frac && !(*cv_train_frac > 0.0 && *cv_train_frac < 1.0))
    throw ConfigError("cv-train-frac must be inside (0,1)");
  if (mcmc.chains == 0) throw ConfigError("chains must be >= 1");
  if (mcmc.total_draws == 0) throw ConfigError("draws must be >= 1");
  for (const auto& fmt : formats)
    if (fmt != "json" && fmt != "md" && fmt != "svg")
      throw ConfigError("unknown format \"" + fmt + "\" (expected json, md, svg)");
}

double RunConfig::effective_rho(const PerfTable& table, bool* clamped) const {
  if (clamped) *clamped = false;
  double value;
  if (rho) {
    value = *rho;
  } else if (cv_train_frac) {
    value = (1.0 - *cv_train_frac) / *cv_train_frac;
  } else {
    // Derive from the fold structure: f-fold CV tests on 1/f of the data
    // and trains on (f-1)/f, so rho = 1/(f-1).
    int max_fold = 1;
    for (const FoldId& f : table.folds()) max_fold = std::max(max_fold, f.fold_index);
    value = max_fold > 1 ? 1.0 / (static_cast<double>(max_fold) - 1.0) : 1.0;
  }
  if (value >= 1.0 - 1e-3) {
    value = 1.0 - 1e-3;
    if (clamped) *clamped = true;
  }
  return value;
}

bool RunConfig::wants_format(const std::string& fmt) const {
  return std::find(formats.begin(), formats.end(), fmt) != formats.end();
}

RunConfig parse_config_file(std::istream& in) {
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "input") config.input_path = value;
    else if (key == "columns") {
      const auto parts = split(value, ',');
      if (parts.size() != 4)
        throw ConfigError("config: columns needs 4 comma-separated names");
      config.columns.value = parts[0];
      config.columns.resample = parts[1];
      config.columns.dataset_cols = split(parts[2], '+');
      config.columns.model = parts[3];
    } else if (key == "alpha") config.alpha = parse_double(key, value);
    else if (key == "rope") config.rope = parse_double(key, value);
    else if (key == "threshold") config.threshold = parse_double(key, value);
    else if (key == "rho") config.rho = parse_double(key, value);
    else if (key == "cv_train_frac") config.cv_train_frac = parse_double(key, value);
    else if (key == "chains") config.mcmc.chains = parse_u64(key, value);
    else if (key == "draws") config.mcmc.total_draws = parse_u64(key, value);
    else if (key == "burn_in") config.mcmc.burn_in = parse_u64(key, value);
    else if (key == "seed") config.seed = parse_u64(key, value);
    else if (key == "out") config.out_dir = value;
    else if (key == "format") config.formats = split(value, ',');
    else if (key == "jobs") config.jobs = parse_u64(key, value);
    else if (key == "force_posthoc") config.force_posthoc = value == "true";
    else if (key == "simplex_plots") config.simplex_plots = value == "true";
    else throw ConfigError("config: unknown key \"" + key + "\"");
  }
  return config;
}

void write_config_file(const RunConfig& config, std::ostream& out) {
  out << "input = " << config.input_path << "\n";
  out << "columns = " << config.columns.value << "," << config.columns.resample << ","
      << join(config.columns.dataset_cols, '+') << "," << config.columns.model << "\n";
  out << "alpha = " << format_double(config.alpha) << "\n";
  out << "rope = " << format_double(config.rope) << "\n";
  out << "threshold = " << format_double(config.threshold) << "\n";
  if (config.rho) out << "rho = " << format_double(*config.rho) << "\n";
  if (config.cv_train_frac)
    out << "cv_train_frac = " << format_double(*config.cv_train_frac) << "\n";
  out << "chains = " << config.mcmc.chains << "\n";
  out << "draws = " << config.mcmc.total_draws << "\n";
  out << "burn_in = " << config.mcmc.burn_in << "\n";
  out << "seed = " << config.seed << "\n";
  out << "out = " << config.out_dir << "\n";
  out << "format = " << join(config.formats, ',') << "\n";
  out << "jobs = " << config.jobs << "\n";
  out << "force_posthoc = " << (config.force_posthoc ? "true" : "false") << "\n";
  out << "simplex_plots = " << (config.simplex_plots ? "true" : "false") << "\n";
}

}  // namespace modelcmp
