#ifndef MODELCMP_PERF_DATA_HPP
#define MODELCMP_PERF_DATA_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "modelcmp/matrix.hpp"

namespace modelcmp {

/// One cross-validation resample, e.g. "Fold1.Rep2" = fold 1 of repetition 2.
struct FoldId {
  int fold_index = 1;  // >= 1
  int rep_index = 1;   // >= 1

  /// Parses "Fold<i>.Rep<j>". Throws ValidationError on anything else.
  static FoldId parse(const std::string& text);
  std::string to_string() const;

  bool operator==(const FoldId&) const = default;
  auto operator<=>(const FoldId&) const = default;
};

/// Train/test sizes (or fractions) of one cross-validation fold; feeds the
/// fold-overlap correlation rho = n_test / n_train.
struct CvGeometry {
  double n_train = 0.0;
  double n_test = 0.0;
};

/// Which CSV columns hold what. `dataset_cols` may name several columns;
/// their values are joined with "::" to form a composite dataset id.
struct ColumnMapping {
  std::string value = "value";
  std::string resample = "resample";
  std::vector<std::string> dataset_cols = {"dataset"};
  std::string model = "model";
};

/// Complete fold-level results grid: one metric value per
/// (dataset, model, fold-replicate) cell. Immutable after construction and
/// safe to share across threads.
class PerfTable {
 public:
  /// Validates and adopts the grid. `values` is dataset-major then model
  /// then fold: values[(i*k + j)*r + f]. Throws ValidationError on a
  /// malformed grid (wrong size, non-finite cells, out-of-range values for
  /// a bounded metric, too-small N/k/r, duplicate ids).
  PerfTable(std::vector<std::string> datasets, std::vector<std::string> models,
            std::vector<FoldId> folds, std::vector<double> values,
            std::string metric_name, bool higher_is_better = true);

  std::size_t n_datasets() const { return datasets_.size(); }
  std::size_t n_models() const { return models_.size(); }
  std::size_t n_folds() const { return folds_.size(); }

  const std::vector<std::string>& datasets() const { return datasets_; }
  const std::vector<std::string>& models() const { return models_; }
  const std::vector<FoldId>& folds() const { return folds_; }
  const std::string& metric_name() const { return metric_name_; }
  bool higher_is_better() const { return higher_is_better_; }

  /// True when the metric is declared bounded to [0,1] (AUC).
  bool bounded_unit_interval() const { return bounded_; }

  double value(std::size_t dataset, std::size_t model, std::size_t fold) const {
    return values_[(dataset * models_.size() + model) * folds_.size() + fold];
  }
  const std::vector<double>& values() const { return values_; }

  /// Index of a model id; throws ValidationError if unknown.
  std::size_t model_index(const std::string& id) const;

  bool operator==(const PerfTable&) const = default;

 private:
  std::vector<std::string> datasets_;
  std::vector<std::string> models_;
  std::vector<FoldId> folds_;
  std::vector<double> values_;
  std::string metric_name_;
  bool higher_is_better_ = true;
  bool bounded_ = false;
};

/// Per-dataset fold-level metric differences for one model pair, oriented so
/// positive always means `model_x` performed better.
struct PairDifferences {
  std::string model_x;
  std::string model_y;
  std::vector<std::vector<double>> per_dataset;  // N vectors of length r
};

/// Parses fold-level results from CSV text. Row order is irrelevant;
/// dataset/model/fold orderings follow first appearance. The metric name is
/// taken from the mapped value column; a value column named "AUC"
/// (case-insensitive) declares the metric bounded to [0,1].
/// Throws ValidationError (missing column, bad value, duplicate cell,
/// incomplete grid with every missing cell listed, malformed resample).
PerfTable parse_results_csv(std::istream& stream,
                            const ColumnMapping& mapping = {});

/// Writes the table back out in the canonical column layout
/// (metric, resample, dataset, model), one row per cell in table order.
/// Values are shortest-round-trip formatted, so reparsing with
/// ColumnMapping{.value = table.metric_name()} reproduces the table exactly.
void write_results_csv(const PerfTable& table, std::ostream& out);

/// x-minus-y fold differences per dataset (negated when lower is better, so
/// positive always favors x). Throws ValidationError when x == y or either
/// id is unknown.
PairDifferences pair_differences(const PerfTable& table, const std::string& x,
                                 const std::string& y);

/// N-by-k grid of fold-averaged scores.
Matrix dataset_means(const PerfTable& table);

}  // namespace modelcmp

#endif
