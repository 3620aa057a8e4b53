#ifndef MODELCMP_CALIB_SIM_HPP
#define MODELCMP_CALIB_SIM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/perf_data.hpp"

namespace modelcmp {

/// Ground-truth configuration for the hierarchical generative model:
/// mu_i ~ t(mu_0, sigma_0, nu), sigma_i ~ Uniform(0.5, 1.5) * sigma_i_scale,
/// x_i ~ MVN(mu_i * 1, compound-symmetric Sigma(sigma_i, rho)).
struct GenSpec {
  std::size_t n_datasets = 20;
  std::size_t n_folds = 10;
  double mu_0 = 0.0;
  double sigma_0 = 0.01;
  double nu = 5.0;  // > 2 so the t draws have finite variance
  double sigma_i_scale = 0.02;
  double rho = 1.0 / 9.0;
  std::uint64_t seed = 0;
};

/// Ground truth attached to a generated replicate.
struct GenTruth {
  double mu_0 = 0.0;
  std::vector<double> mu_i;
  std::vector<double> sigma_i;
};

struct GeneratedDifferences {
  PairDifferences diffs;
  GenTruth truth;
};

/// Draws one synthetic pair-difference dataset from the generative model.
/// The compound-symmetric draw uses the O(r) factorization
/// x = mu 1 + sigma (sqrt(rho) g 1 + sqrt(1-rho) e).
GeneratedDifferences generate_pair_differences(const GenSpec& spec);

/// Null table: score(dataset, model, fold) = per-dataset baseline + i.i.d.
/// noise, so all models are exchangeable and any rejection is a false
/// positive. Metric is unbounded ("score") to avoid clipping artifacts.
PerfTable generate_null_table(std::size_t n_datasets, std::size_t n_models,
                              std::size_t n_folds, std::uint64_t seed);

/// Null-calibration summary over repeated synthetic experiments.
struct NullCalibration {
  std::size_t runs = 0;
  double alpha = 0.05;
  double friedman_rejection_rate = 0.0;
  double naive_unique_best_rate = 0.0;
};

NullCalibration run_null_calibration(std::size_t n_datasets, std::size_t n_models,
                                     std::size_t n_folds, std::size_t runs,
                                     double alpha, std::uint64_t seed);

/// Summary of repeated end-to-end sampler runs against known ground truth.
struct CoverageSummary {
  std::size_t runs = 0;
  std::size_t sampler_failures = 0;
  double ci_coverage_90 = 0.0;   // fraction of runs whose central 90% CI for
                                 // mu_0 contains the true value
  double decided_fraction = 0.0; // fraction of runs with some theta component
                                 // above the threshold
  double mean_p_rope = 0.0;
  double rhat_ok_fraction = 0.0; // fraction of runs with every R-hat <= 1.05
};

struct CoverageConfig {
  GenSpec spec;
  std::size_t runs = 200;
  McmcConfig mcmc;
  double rope = 0.01;
  double threshold = 0.95;
  std::uint64_t seed = 0;
};

CoverageSummary coverage_experiment(const CoverageConfig& config);

/// Closed-form correlated Bayesian t-test on a single difference vector:
/// Student posterior with location mean(x), scale^2 = (1/r + rho/(1-rho)) s^2
/// and r-1 degrees of freedom, evaluated at the ROPE edges. Zero-variance
/// data degenerates to an indicator at the sample mean.
Theta single_dataset_oracle(std::span<const double> x, double rho, double rope);

}  // namespace modelcmp

#endif
