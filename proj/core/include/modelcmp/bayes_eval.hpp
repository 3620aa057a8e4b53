#ifndef MODELCMP_BAYES_EVAL_HPP
#define MODELCMP_BAYES_EVAL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modelcmp/perf_data.hpp"
#include "modelcmp/ranking.hpp"
#include "modelcmp/rng.hpp"

namespace modelcmp {

/// Prior specification for the hierarchical correlated t-test. The two data
/// scales sigma_i_upper and sigma0_upper are built from the observed
/// differences (1000x the relevant sample dispersion), everything else is
/// fixed by convention.
struct HierPriors {
  double mu0_lo = -1.0, mu0_hi = 1.0;
  double sigma0_upper = 1.0;   // upper bound of the Uniform prior on sigma_0
  double sigma_i_upper = 1.0;  // shared upper bound for every sigma_i
  double alpha_lo = 0.5, alpha_hi = 5.0;
  double beta_lo = 0.05, beta_hi = 0.15;
  double rho = 0.1;  // fold-overlap correlation, strictly inside (0,1)

  /// sigma_i lives on [sigma_i_floor(), sigma_i_upper]: the tiny relative
  /// floor keeps the posterior proper when a difference vector is constant.
  double sigma_i_floor() const { return 1e-12 * sigma_i_upper; }

  /// Data-driven construction: sigma_i_upper = 1000 * mean per-dataset
  /// sample sd of the differences, sigma0_upper = 1000 * sd of the
  /// per-dataset mean differences (falls back to sigma_i_upper when N = 1).
  /// Both floored at 1e-6 so degenerate all-constant data stays usable.
  static HierPriors from_data(const PairDifferences& diffs, double rho);
};

/// One point in the hierarchical model's parameter space.
struct HierState {
  std::vector<double> mu_i;     // per-dataset mean difference
  std::vector<double> sigma_i;  // per-dataset estimation sd
  double mu_0 = 0.0;
  double sigma_0 = 1.0;
  double nu = 5.0;
  double alpha = 2.0;
  double beta = 0.1;
};

/// Posterior probability triple. p_left is the probability that model X is
/// better (mean difference above +rope) -- it sits on the left vertex of
/// the simplex plot; p_right is X worse; p_rope is practical equivalence.
struct Theta {
  double p_left = 0.0;
  double p_rope = 0.0;
  double p_right = 0.0;
};

/// Sampler settings. total_draws counts retained draws across all chains;
/// burn_in is per chain. Step sizes adapt toward 20-50% acceptance during
/// burn-in only.
struct McmcConfig {
  std::size_t chains = 4;
  std::size_t total_draws = 50000;
  std::size_t burn_in = 2500;
  std::size_t adapt_window = 50;

  std::size_t draws_per_chain() const {
    return (total_draws + chains - 1) / chains;
  }
};

/// Retained MCMC draws, parameter-major per chain:
/// value(c, p, s) = draw s of scalar parameter p in chain c.
/// Parameter order: mu_i[0..N), sigma_i[0..N), mu_0, sigma_0, nu, alpha, beta.
struct Chains {
  std::size_t n_datasets = 0;
  std::vector<std::vector<std::vector<double>>> draws;  // [chain][param][draw]
  std::vector<Rng> end_rngs;  // per-chain stream state after the last sweep

  std::size_t n_chains() const { return draws.size(); }
  std::size_t n_draws() const { return draws.empty() ? 0 : draws[0][0].size(); }
  std::size_t n_params() const { return 2 * n_datasets + 5; }

  std::size_t idx_mu(std::size_t i) const { return i; }
  std::size_t idx_sigma(std::size_t i) const { return n_datasets + i; }
  std::size_t idx_mu0() const { return 2 * n_datasets; }
  std::size_t idx_sigma0() const { return 2 * n_datasets + 1; }
  std::size_t idx_nu() const { return 2 * n_datasets + 2; }
  std::size_t idx_alpha() const { return 2 * n_datasets + 3; }
  std::size_t idx_beta() const { return 2 * n_datasets + 4; }

  std::string param_name(std::size_t p) const;

  /// All draws of one parameter pooled across chains.
  std::vector<double> pooled(std::size_t p) const;
};

struct ParamDiagnostic {
  std::string name;
  double rhat = 1.0;  // NaN when unavailable (single chain)
  double ess = 0.0;
};

struct Diagnostics {
  std::vector<ParamDiagnostic> params;
  bool rhat_available = true;

  double max_rhat() const;
  double min_ess() const;
};

/// Full record of one pairwise comparison.
struct PairPosterior {
  std::string model_x, model_y;
  Theta theta;
  double rope_halfwidth = 0.01;
  Diagnostics diagnostics;
  bool reliable = true;  // every R-hat <= 1.05
  std::uint64_t seed = 0;
  std::optional<Chains> chains;  // dropped inside matrix runs to save memory
};

enum class Verdict { x_better, y_better, rope, no_decision };

const char* to_string(Verdict v);

/// k-by-k grid of pairwise verdicts; cell(i, j) reads "row model i vs
/// column model j". Antisymmetric by construction, diagonal rope.
struct DecisionMatrix {
  std::vector<std::string> models;
  std::vector<Verdict> cells;  // k*k row-major
  double threshold = 0.95;
  double rope = 0.01;

  struct PairSummary {
    std::size_t i = 0, j = 0;  // i < j
    Theta theta;
    double max_rhat = 1.0;
    double min_ess = 0.0;
    bool reliable = true;
  };
  std::vector<PairSummary> pair_summaries;  // in pair-id order

  Verdict cell(std::size_t i, std::size_t j) const {
    return cells[i * models.size() + j];
  }
  /// Fraction of off-diagonal cells holding a decision (not no_decision).
  double decided_fraction() const;
};

/// Options shared by compare_pair and the full decision matrix.
struct BayesConfig {
  double rho = 0.1;
  double rope = 0.01;
  double threshold = 0.95;
  McmcConfig mcmc;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;      // 0 = all hardware threads
  double rhat_limit = 1.05;
  bool theta_from_mu0 = false;  // sensitivity switch: classify mu_0 draws
                                // instead of predictive draws
};

/// Nadeau-Bengio fold-overlap correlation n_test / n_train, clamped to
/// 1 - 1e-3 when n_test >= n_train (2-fold CV makes the covariance
/// singular). `clamped` reports whether the clamp fired.
double rho_from_cv(const CvGeometry& geometry, bool* clamped = nullptr);

/// Exact log-density of MVN(mu * 1, Sigma) with compound-symmetric Sigma
/// (diagonal sigma2, off-diagonal rho * sigma2), computed in O(r) from the
/// closed-form inverse and determinant. Throws ValidationError for
/// rho outside (0,1), sigma2 <= 0, or r < 2.
double cs_gaussian_logpdf(std::span<const double> x, double mu, double sigma2,
                          double rho);

/// Log posterior density of the full hierarchical state: compound-symmetric
/// likelihood, t prior on each mu_i, and the fixed priors. Returns -inf
/// outside any prior support.
double hier_log_posterior(const HierState& state, const PairDifferences& diffs,
                          const HierPriors& priors);

/// Adaptive per-coordinate random-walk Metropolis. Deterministic given the
/// seed; chains are initialized at overdispersed data-driven points. Throws
/// Error if the initial state has a non-finite log posterior.
Chains run_mcmc(const PairDifferences& diffs, const HierPriors& priors,
                const McmcConfig& config, std::uint64_t seed);

/// Rank-normalized split R-hat plus a batch-means effective sample size for
/// every scalar parameter. With a single chain R-hat is flagged unavailable.
Diagnostics diagnostics(const Chains& chains);

/// Posterior predictive theta: one draw of the mean difference on a future
/// unseen dataset per retained (mu_0, sigma_0, nu), classified against
/// [-rope, +rope]. Components are exact empirical fractions summing to 1.
/// Continues each chain's recorded RNG stream, so repeated calls agree.
Theta posterior_theta(const Chains& chains, double rope_halfwidth,
                      bool theta_from_mu0 = false);

/// Per-draw probability triples (t CDF at the ROPE edges) for the simplex
/// plot, thinned to at most max_points.
std::vector<Theta> posterior_simplex_samples(const Chains& chains,
                                             double rope_halfwidth,
                                             std::size_t max_points = 2000);

/// Full pairwise comparison: differences -> data-driven priors -> MCMC ->
/// diagnostics -> theta. `priors_override` replaces the data-driven priors
/// (sensitivity analysis / calibration fixtures).
PairPosterior compare_pair(const PerfTable& table, const std::string& x,
                           const std::string& y, const BayesConfig& config,
                           std::optional<HierPriors> priors_override = std::nullopt,
                           bool keep_chains = true);

/// All unordered pairs, independently seeded from (seed, pair id) so the
/// result is identical for any job count or execution order. Pairs whose
/// worst R-hat exceeds rhat_limit are forced to no_decision.
DecisionMatrix bayes_decision_matrix(const PerfTable& table, const BayesConfig& config);

/// f1 = best overall mean; members are f1 plus every model whose verdict
/// against f1 is rope, ordered by overall mean in descending performance.
FamilyOfBest bayes_family(const DecisionMatrix& matrix,
                          const std::vector<double>& means, bool higher_is_better);

namespace detail {
/// Stable per-pair seed: master seed mixed with an FNV-1a hash of the two
/// model ids, so parallel scheduling cannot change any pair's stream.
std::uint64_t pair_seed(std::uint64_t master_seed, const std::string& x,
                        const std::string& y);
}  // namespace detail

}  // namespace modelcmp

#endif
