#include "modelcmp/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modelcmp/errors.hpp"

namespace modelcmp {

const char* to_string(EvalMethod m) {
  switch (m) {
    case EvalMethod::naive: return "naive";
    case EvalMethod::nhst: return "nhst";
    case EvalMethod::bayes: return "bayes";
  }
  return "?";
}

std::vector<double> mid_ranks(std::span<const double> row, bool higher_is_better) {
  const std::size_t k = row.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  // Sort so the best score comes first; ties keep index order (irrelevant,
  // tied entries share one mid-rank anyway).
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return higher_is_better ? row[a] > row[b] : row[a] < row[b];
  });

  std::vector<double> ranks(k, 0.0);
  std::size_t pos = 0;
  while (pos < k) {
    std::size_t end = pos + 1;
    while (end < k && row[order[end]] == row[order[pos]]) ++end;
    // Positions pos+1 .. end span the tied group; assign their mean.
    const double mid = (static_cast<double>(pos + 1) + static_cast<double>(end)) / 2.0;
    for (std::size_t t = pos; t < end; ++t) ranks[order[t]] = mid;
    pos = end;
  }
  return ranks;
}

RankMatrix rank_matrix(const Matrix& means, bool higher_is_better) {
  RankMatrix out;
  const std::size_t n = means.rows(), k = means.cols();
  out.per_dataset_ranks = Matrix(n, k);
  out.avg_ranks.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    std::span<const double> row(means.data().data() + i * k, k);
    const auto ranks = mid_ranks(row, higher_is_better);
    for (std::size_t j = 0; j < k; ++j) {
      out.per_dataset_ranks.at(i, j) = ranks[j];
      out.avg_ranks[j] += ranks[j];
    }
  }
  for (double& r : out.avg_ranks) r /= static_cast<double>(n);
  return out;
}

std::vector<double> overall_means(const PerfTable& table) {
  const std::size_t n = table.n_datasets(), k = table.n_models(), r = table.n_folds();
  std::vector<double> means(k, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j)
      for (std::size_t f = 0; f < r; ++f) means[j] += table.value(i, j, f);
  for (double& m : means) m /= static_cast<double>(n * r);
  return means;
}

FamilyOfBest naive_best(const PerfTable& table) {
  const auto means = overall_means(table);
  const bool hib = table.higher_is_better();
  std::size_t best = 0;
  for (std::size_t j = 1; j < means.size(); ++j)
    if (hib ? means[j] > means[best] : means[j] < means[best]) best = j;

  std::vector<std::string> tied;
  for (std::size_t j = 0; j < means.size(); ++j)
    if (means[j] == means[best]) tied.push_back(table.models()[j]);
  if (tied.size() > 1) {
    std::string msg = "naive method: exact tie for the best overall mean between";
    for (const auto& id : tied) msg += " \"" + id + "\"";
    throw TieError(msg, std::move(tied));
  }

  FamilyOfBest family;
  family.method = EvalMethod::naive;
  family.members = {table.models()[best]};
  family.epistemic_note =
      "all observed differences were assumed genuine and significant; "
      "no statistical test was applied";
  return family;
}

}  // namespace modelcmp
