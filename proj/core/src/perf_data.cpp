#include "modelcmp/perf_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "modelcmp/csv.hpp"
#include "modelcmp/errors.hpp"

namespace modelcmp {

namespace {

bool parse_positive_int(std::string_view text, int& out) {
  if (text.empty()) return false;
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return false;
  if (value < 1) return false;
  out = value;
  return true;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  return true;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

FoldId FoldId::parse(const std::string& text) {
  auto fail = [&]() -> FoldId {
    throw ValidationError("malformed resample string \"" + text +
                          "\" (expected Fold<i>.Rep<j>)");
  };
  std::string_view sv(text);
  if (sv.substr(0, 4) != "Fold") return fail();
  sv.remove_prefix(4);
  auto dot = sv.find(".Rep");
  if (dot == std::string_view::npos) return fail();
  FoldId id;
  if (!parse_positive_int(sv.substr(0, dot), id.fold_index)) return fail();
  if (!parse_positive_int(sv.substr(dot + 4), id.rep_index)) return fail();
  return id;
}

std::string FoldId::to_string() const {
  return "Fold" + std::to_string(fold_index) + ".Rep" + std::to_string(rep_index);
}

PerfTable::PerfTable(std::vector<std::string> datasets,
                     std::vector<std::string> models, std::vector<FoldId> folds,
                     std::vector<double> values, std::string metric_name,
                     bool higher_is_better)
    : datasets_(std::move(datasets)),
      models_(std::move(models)),
      folds_(std::move(folds)),
      values_(std::move(values)),
      metric_name_(std::move(metric_name)),
      higher_is_better_(higher_is_better),
      bounded_(iequals(metric_name_, "auc")) {
  const std::size_t n = datasets_.size(), k = models_.size(), r = folds_.size();
  if (n < 1) throw ValidationError("need at least 1 dataset");
  if (k < 2) throw ValidationError("need at least 2 models, got " + std::to_string(k));
  if (r < 2)
    throw ValidationError("need at least 2 fold-replicates, got " + std::to_string(r));
  if (values_.size() != n * k * r)
    throw ValidationError("value grid has " + std::to_string(values_.size()) +
                          " cells, expected " + std::to_string(n * k * r));

  auto check_unique = [](const auto& ids, const char* what) {
    auto sorted = ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError(std::string("duplicate ") + what + " identifier");
  };
  check_unique(datasets_, "dataset");
  check_unique(models_, "model");
  check_unique(folds_, "fold");

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t f = 0; f < r; ++f) {
        const double v = value(i, j, f);
        if (!std::isfinite(v))
          throw ValidationError("non-finite value at (" + datasets_[i] + ", " +
                                models_[j] + ", " + folds_[f].to_string() + ")");
        if (bounded_ && (v < 0.0 || v > 1.0))
          throw ValidationError("value " + format_double(v) + " outside [0,1] at (" +
                                datasets_[i] + ", " + models_[j] + ", " +
                                folds_[f].to_string() + ") for bounded metric " +
                                metric_name_);
      }
}

std::size_t PerfTable::model_index(const std::string& id) const {
  auto it = std::find(models_.begin(), models_.end(), id);
  if (it == models_.end()) throw ValidationError("unknown model id \"" + id + "\"");
  return static_cast<std::size_t>(it - models_.begin());
}

PerfTable parse_results_csv(std::istream& stream, const ColumnMapping& mapping) {
  csv::Reader reader(stream);
  std::vector<std::string> header;
  if (!reader.next(header)) throw ValidationError("CSV: empty input, no header row");

  auto column_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ValidationError("CSV: missing column \"" + name + "\"");
  };

  const std::size_t value_col = column_of(mapping.value);
  const std::size_t resample_col = column_of(mapping.resample);
  const std::size_t model_col = column_of(mapping.model);
  if (mapping.dataset_cols.empty())
    throw ValidationError("CSV: mapping needs at least one dataset column");
  std::vector<std::size_t> dataset_cols;
  for (const auto& name : mapping.dataset_cols) dataset_cols.push_back(column_of(name));

  std::vector<std::string> datasets, models;
  std::vector<FoldId> folds;
  std::unordered_map<std::string, std::size_t> dataset_idx, model_idx;
  std::map<FoldId, std::size_t> fold_idx;

  struct Cell {
    std::size_t dataset, model, fold;
    double value;
  };
  std::vector<Cell> cells;

  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank line
    if (row.size() != header.size())
      throw ValidationError("CSV: line " + std::to_string(reader.record_line()) +
                            " has " + std::to_string(row.size()) + " fields, header has " +
                            std::to_string(header.size()));

    double v = 0.0;
    {
      const std::string& text = row[value_col];
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ValidationError("CSV: non-numeric value \"" + text + "\" on line " +
                              std::to_string(reader.record_line()));
    }

    const FoldId fold = FoldId::parse(row[resample_col]);

    std::string dataset_id;
    for (std::size_t i = 0; i < dataset_cols.size(); ++i) {
      if (i) dataset_id += "::";
      dataset_id += row[dataset_cols[i]];
    }
    const std::string& model_id = row[model_col];

    auto intern = [](auto& ids, auto& index, const auto& id) {
      auto [it, inserted] = index.try_emplace(id, ids.size());
      if (inserted) ids.push_back(id);
      return it->second;
    };
    const std::size_t di = intern(datasets, dataset_idx, dataset_id);
    const std::size_t mi = intern(models, model_idx, model_id);
    const std::size_t fi = intern(folds, fold_idx, fold);
    cells.push_back({di, mi, fi, v});
  }

  if (cells.empty()) throw ValidationError("CSV: no data rows");

  const std::size_t n = datasets.size(), k = models.size(), r = folds.size();
  std::vector<double> values(n * k * r, 0.0);
  std::vector<char> present(n * k * r, 0);
  for (const Cell& c : cells) {
    const std::size_t at = (c.dataset * k + c.model) * r + c.fold;
    if (present[at])
      throw ValidationError("CSV: duplicate cell (" + datasets[c.dataset] + ", " +
                            models[c.model] + ", " + folds[c.fold].to_string() + ")");
    present[at] = 1;
    values[at] = c.value;
  }

  std::string missing;
  std::size_t missing_count = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t f = 0; f < r; ++f)
        if (!present[(i * k + j) * r + f]) {
          ++missing_count;
          missing += "\n  (" + datasets[i] + ", " + models[j] + ", " +
                     folds[f].to_string() + ")";
        }
  if (missing_count)
    throw ValidationError("incomplete grid: " + std::to_string(missing_count) +
                          " missing cell(s):" + missing);

  return PerfTable(std::move(datasets), std::move(models), std::move(folds),
                   std::move(values), mapping.value);
}

void write_results_csv(const PerfTable& table, std::ostream& out) {
  out << csv::join({table.metric_name(), "resample", "dataset", "model"}) << "\n";
  for (std::size_t i = 0; i < table.n_datasets(); ++i)
    for (std::size_t j = 0; j < table.n_models(); ++j)
      for (std::size_t f = 0; f < table.n_folds(); ++f) {
        out << csv::join({format_double(table.value(i, j, f)),
                          table.folds()[f].to_string(), table.datasets()[i],
                          table.models()[j]})
            << "\n";
      }
}

PairDifferences pair_differences(const PerfTable& table, const std::string& x,
                                 const std::string& y) {
  if (x == y)
    throw ValidationError("pair_differences requires two distinct models, got \"" + x +
                          "\" twice");
  const std::size_t xi = table.model_index(x);
  const std::size_t yi = table.model_index(y);
  const double sign = table.higher_is_better() ? 1.0 : -1.0;

  PairDifferences diffs;
  diffs.model_x = x;
  diffs.model_y = y;
  diffs.per_dataset.resize(table.n_datasets());
  for (std::size_t i = 0; i < table.n_datasets(); ++i) {
    auto& vec = diffs.per_dataset[i];
    vec.resize(table.n_folds());
    for (std::size_t f = 0; f < table.n_folds(); ++f)
      vec[f] = sign * (table.value(i, xi, f) - table.value(i, yi, f));
  }
  return diffs;
}

Matrix dataset_means(const PerfTable& table) {
  Matrix means(table.n_datasets(), table.n_models());
  const double r = static_cast<double>(table.n_folds());
  for (std::size_t i = 0; i < table.n_datasets(); ++i)
    for (std::size_t j = 0; j < table.n_models(); ++j) {
      double sum = 0.0;
      for (std::size_t f = 0; f < table.n_folds(); ++f) sum += table.value(i, j, f);
      means.at(i, j) = sum / r;
    }
  return means;
}

}  // namespace modelcmp
