#ifndef MODELCMP_CONFIG_HPP
#define MODELCMP_CONFIG_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/perf_data.hpp"

namespace modelcmp {

/// Everything a run needs. Defaults follow the evaluation conventions:
/// alpha 0.05, ROPE half-width 0.01 on AUC differences, decision threshold
/// 0.95, 4 chains x 12500 retained draws (50k total).
struct RunConfig {
  std::string input_path;
  ColumnMapping columns;
  double alpha = 0.05;
  double rope = 0.01;
  double threshold = 0.95;
  std::optional<double> rho;            // explicit fold-overlap correlation
  std::optional<double> cv_train_frac;  // alternative: train fraction per fold
  McmcConfig mcmc;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  std::vector<std::string> formats = {"json", "md", "svg"};
  std::size_t jobs = 0;  // 0 = all cores
  bool force_posthoc = false;
  bool simplex_plots = false;

  /// Throws ConfigError when any numeric field is outside its range.
  void validate() const;

  /// Resolves the correlation: explicit rho wins, then cv_train_frac, then
  /// the fold structure of the table (f-fold CV gives 1/(f-1)). Clamps to
  /// 1 - 1e-3 when degenerate; `clamped` reports whether that fired.
  double effective_rho(const PerfTable& table, bool* clamped = nullptr) const;

  bool wants_format(const std::string& fmt) const;
};

/// Key-value config file ("key = value", '#' comments). Unknown keys are an
/// error; values follow the same spelling as the CLI flags.
RunConfig parse_config_file(std::istream& in);

/// Writes every field; parse_config_file(write_config_file(c)) == c.
void write_config_file(const RunConfig& config, std::ostream& out);

}  // namespace modelcmp

#endif
