#ifndef MODELCMP_FREQ_EVAL_HPP
#define MODELCMP_FREQ_EVAL_HPP

#include <cstddef>
#include <vector>

#include "modelcmp/ranking.hpp"

namespace modelcmp {

/// Friedman omnibus test result over N datasets and k models.
struct FriedmanOutcome {
  double statistic = 0.0;  // chi-square statistic, >= 0
  std::size_t dof = 0;     // k - 1
  double p_value = 1.0;
  std::size_t n_datasets = 0;
  std::size_t n_models = 0;
};

/// Nemenyi post-hoc result: the critical difference and the pairwise
/// significance matrix over average ranks.
struct NemenyiOutcome {
  double alpha = 0.05;
  double q_alpha = 0.0;
  double cd = 0.0;
  std::vector<std::vector<bool>> significant;  // k x k, symmetric, false diagonal
};

/// Friedman chi-square statistic from average ranks with the chi-square
/// upper-tail p-value at k-1 degrees of freedom. Requires N >= 2, k >= 2.
FriedmanOutcome friedman_statistic(const RankMatrix& ranks, std::size_t n_datasets);

/// Upper tail 1 - F(x; dof) of the chi-square distribution, via the
/// regularized incomplete gamma. Absolute error <= 1e-10.
double chi_square_upper_tail(double x, std::size_t dof);

/// q_alpha for the Nemenyi test: the (1-alpha) quantile of the range of k
/// independent standard normals, divided by sqrt(2). Computed by adaptive
/// quadrature of the range CDF plus bisection; results are memoized per
/// (k, alpha).
double studentized_range_quantile(std::size_t k, double alpha);

/// Critical difference cd = q_alpha * sqrt(k(k+1)/(6N)) and the pairwise
/// significance matrix |R_i - R_j| > cd.
NemenyiOutcome nemenyi(const RankMatrix& ranks, std::size_t n_datasets, double alpha);

/// Models statistically indistinguishable from the top-ranked one:
/// the best-ranked model plus every model whose average-rank gap from it is
/// below cd, ordered by average rank. Throws OmnibusRetainedError when the
/// omnibus p-value is not below alpha (pass force=true to override).
FamilyOfBest nhst_family(const RankMatrix& ranks,
                         const std::vector<std::string>& models,
                         const FriedmanOutcome& omnibus, const NemenyiOutcome& posthoc,
                         bool force = false);

}  // namespace modelcmp

#endif
