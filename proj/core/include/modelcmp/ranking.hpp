#ifndef MODELCMP_RANKING_HPP
#define MODELCMP_RANKING_HPP

#include <span>
#include <string>
#include <vector>

#include "modelcmp/matrix.hpp"
#include "modelcmp/perf_data.hpp"

namespace modelcmp {

/// Per-dataset mid-ranks (rank 1 = best) plus the columnwise average rank
/// R_j of each model. Every rank row sums to k(k+1)/2.
struct RankMatrix {
  Matrix per_dataset_ranks;       // N x k
  std::vector<double> avg_ranks;  // length k
};

enum class EvalMethod { naive, nhst, bayes };

const char* to_string(EvalMethod m);

/// Ordered set of models judged best by one evaluation method, plus the
/// method's epistemic caveat ("no conclusion possible" for NHST vs
/// "positively practically equivalent" for Bayes).
struct FamilyOfBest {
  EvalMethod method = EvalMethod::naive;
  std::vector<std::string> members;  // descending performance, front = f1
  std::string epistemic_note;
};

/// Mid-ranks of one score row: best score gets rank 1, ties share the mean
/// of the positions they span, so the output always sums to k(k+1)/2.
std::vector<double> mid_ranks(std::span<const double> row, bool higher_is_better);

/// Ranks every row of the N-by-k means grid and averages columnwise.
RankMatrix rank_matrix(const Matrix& means, bool higher_is_better);

/// Grand mean over all N*r cells per model (equals the mean of dataset
/// means under the enforced balanced design).
std::vector<double> overall_means(const PerfTable& table);

/// The naive-average selection: a singleton family holding the model with
/// the best overall mean. An exact tie for the maximum throws TieError
/// naming the tied models.
FamilyOfBest naive_best(const PerfTable& table);

}  // namespace modelcmp

#endif
