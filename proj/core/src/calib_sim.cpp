#include "modelcmp/calib_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "modelcmp/distributions.hpp"
#include "modelcmp/errors.hpp"
#include "modelcmp/freq_eval.hpp"
#include "modelcmp/ranking.hpp"
#include "modelcmp/rng.hpp"

namespace modelcmp {

GeneratedDifferences generate_pair_differences(const GenSpec& spec) {
  if (spec.n_datasets == 0 || spec.n_folds < 2)
    throw ValidationError("generate_pair_differences: need N >= 1 and r >= 2");
  if (!(spec.rho > 0.0 && spec.rho < 1.0))
    throw ValidationError("generate_pair_differences: rho must be inside (0,1)");
  if (!(spec.sigma_0 >= 0.0) || !(spec.sigma_i_scale >= 0.0))
    throw ValidationError("generate_pair_differences: scales must be nonnegative");

  Rng rng(spec.seed);
  GeneratedDifferences out;
  out.truth.mu_0 = spec.mu_0;
  out.diffs.model_x = "synthetic_x";
  out.diffs.model_y = "synthetic_y";
  out.diffs.per_dataset.resize(spec.n_datasets);

  const double sqrt_rho = std::sqrt(spec.rho);
  const double sqrt_1mrho = std::sqrt(1.0 - spec.rho);
  for (std::size_t i = 0; i < spec.n_datasets; ++i) {
    const double mu_i = spec.mu_0 + spec.sigma_0 * rng.student_t(spec.nu);
    const double sigma_i = rng.uniform(0.5, 1.5) * spec.sigma_i_scale;
    out.truth.mu_i.push_back(mu_i);
    out.truth.sigma_i.push_back(sigma_i);

    auto& x = out.diffs.per_dataset[i];
    x.resize(spec.n_folds);
    const double shared = sqrt_rho * rng.normal();
    for (std::size_t f = 0; f < spec.n_folds; ++f)
      x[f] = mu_i + sigma_i * (shared + sqrt_1mrho * rng.normal());
  }
  return out;
}

PerfTable generate_null_table(std::size_t n_datasets, std::size_t n_models,
                              std::size_t n_folds, std::uint64_t seed) {
  if (n_datasets < 1 || n_models < 2 || n_folds < 2)
    throw ValidationError("generate_null_table: need N >= 1, k >= 2, r >= 2");

  Rng rng(seed);
  std::vector<std::string> datasets, models;
  std::vector<FoldId> folds;
  for (std::size_t i = 0; i < n_datasets; ++i) datasets.push_back("d" + std::to_string(i + 1));
  for (std::size_t j = 0; j < n_models; ++j) models.push_back("m" + std::to_string(j + 1));
  for (std::size_t f = 0; f < n_folds; ++f)
    folds.push_back(FoldId{static_cast<int>(f + 1), 1});

  std::vector<double> values(n_datasets * n_models * n_folds);
  for (std::size_t i = 0; i < n_datasets; ++i) {
    const double baseline = rng.uniform(0.4, 0.6);
    for (std::size_t j = 0; j < n_models; ++j)
      for (std::size_t f = 0; f < n_folds; ++f)
        values[(i * n_models + j) * n_folds + f] = baseline + 0.05 * rng.normal();
  }
  return PerfTable(std::move(datasets), std::move(models), std::move(folds),
                   std::move(values), "score");
}

NullCalibration run_null_calibration(std::size_t n_datasets, std::size_t n_models,
                                     std::size_t n_folds, std::size_t runs,
                                     double alpha, std::uint64_t seed) {
  if (runs == 0) throw ConfigError("null calibration: runs must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("null calibration: alpha must be inside (0,1)");

  NullCalibration out;
  out.runs = runs;
  out.alpha = alpha;
  std::size_t rejections = 0, unique_best = 0;
  Rng master(seed);
  for (std::size_t run = 0; run < runs; ++run) {
    const PerfTable table = generate_null_table(n_datasets, n_models, n_folds,
                                                master.fork(run).next_u64());
    const RankMatrix ranks = rank_matrix(dataset_means(table), table.higher_is_better());
    const FriedmanOutcome omnibus = friedman_statistic(ranks, table.n_datasets());
    if (omnibus.p_value < alpha) ++rejections;
    try {
      naive_best(table);
      ++unique_best;
    } catch (const TieError&) {
      // a tie counts as "no unique best"
    }
  }
  out.friedman_rejection_rate = static_cast<double>(rejections) / static_cast<double>(runs);
  out.naive_unique_best_rate = static_cast<double>(unique_best) / static_cast<double>(runs);
  return out;
}

CoverageSummary coverage_experiment(const CoverageConfig& config) {
  if (config.runs == 0) throw ConfigError("coverage experiment: runs must be positive");

  CoverageSummary out;
  out.runs = config.runs;
  std::size_t covered = 0, decided = 0, rhat_ok = 0;
  double p_rope_sum = 0.0;

  Rng master(config.seed);
  for (std::size_t run = 0; run < config.runs; ++run) {
    GenSpec spec = config.spec;
    spec.seed = master.fork(run).next_u64();
    const GeneratedDifferences gen = generate_pair_differences(spec);

    try {
      const HierPriors priors = HierPriors::from_data(gen.diffs, spec.rho);
      const Chains chains =
          run_mcmc(gen.diffs, priors, config.mcmc, master.fork(run ^ 0x5eedULL).next_u64());

      std::vector<double> mu0_draws = chains.pooled(chains.idx_mu0());
      std::sort(mu0_draws.begin(), mu0_draws.end());
      auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(mu0_draws.size() - 1);
        const std::size_t lo = static_cast<std::size_t>(pos);
        const std::size_t hi = std::min(lo + 1, mu0_draws.size() - 1);
        return mu0_draws[lo] + (pos - static_cast<double>(lo)) * (mu0_draws[hi] - mu0_draws[lo]);
      };
      if (quantile(0.05) <= spec.mu_0 && spec.mu_0 <= quantile(0.95)) ++covered;

      const Theta theta = posterior_theta(chains, config.rope);
      if (theta.p_left > config.threshold || theta.p_rope > config.threshold ||
          theta.p_right > config.threshold)
        ++decided;
      p_rope_sum += theta.p_rope;

      const Diagnostics diag = diagnostics(chains);
      if (diag.rhat_available && diag.max_rhat() <= 1.05) ++rhat_ok;
    } catch (const Error&) {
      ++out.sampler_failures;
    }
  }

  const double done = static_cast<double>(config.runs - out.sampler_failures);
  if (done > 0.0) {
    out.ci_coverage_90 = static_cast<double>(covered) / done;
    out.decided_fraction = static_cast<double>(decided) / done;
    out.mean_p_rope = p_rope_sum / done;
    out.rhat_ok_fraction = static_cast<double>(rhat_ok) / done;
  }
  return out;
}

Theta single_dataset_oracle(std::span<const double> x, double rho, double rope) {
  const std::size_t r = x.size();
  if (r < 2) throw ValidationError("single_dataset_oracle: need r >= 2");
  if (!(rho > 0.0 && rho < 1.0))
    throw ValidationError("single_dataset_oracle: rho must be inside (0,1)");
  if (!(rope > 0.0)) throw ValidationError("single_dataset_oracle: rope must be > 0");

  const double rd = static_cast<double>(r);
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / rd;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double s2 = ss / (rd - 1.0);

  Theta theta;
  if (s2 <= 0.0) {
    // Degenerate posterior: a point mass at the sample mean.
    if (mean > rope) theta.p_left = 1.0;
    else if (mean < -rope) theta.p_right = 1.0;
    else theta.p_rope = 1.0;
    return theta;
  }

  const double scale = std::sqrt((1.0 / rd + rho / (1.0 - rho)) * s2);
  const double dof = rd - 1.0;
  const double below = dist::student_cdf((-rope - mean) / scale, dof);
  const double above = 1.0 - dist::student_cdf((rope - mean) / scale, dof);
  theta.p_left = above;
  theta.p_right = below;
  theta.p_rope = 1.0 - above - below;
  return theta;
}

}  // namespace modelcmp
