#include "modelcmp/bayes_eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "modelcmp/distributions.hpp"
#include "modelcmp/errors.hpp"

namespace modelcmp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;

double sample_sd(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}
}  // namespace

HierPriors HierPriors::from_data(const PairDifferences& diffs, double rho) {
  const std::size_t n = diffs.per_dataset.size();
  HierPriors priors;
  priors.rho = rho;

  double mean_sd = 0.0;
  std::vector<double> dataset_means(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x = diffs.per_dataset[i];
    mean_sd += sample_sd(x);
    dataset_means[i] = std::accumulate(x.begin(), x.end(), 0.0) /
                       static_cast<double>(x.size());
  }
  mean_sd /= static_cast<double>(n);

  priors.sigma_i_upper = std::max(1000.0 * mean_sd, 1e-6);
  const double sd_of_means = n > 1 ? sample_sd(dataset_means) : 0.0;
  priors.sigma0_upper =
      n > 1 ? std::max(1000.0 * sd_of_means, 1e-6) : priors.sigma_i_upper;
  return priors;
}

std::string Chains::param_name(std::size_t p) const {
  if (p < n_datasets) return "mu[" + std::to_string(p) + "]";
  if (p < 2 * n_datasets) return "sigma[" + std::to_string(p - n_datasets) + "]";
  switch (p - 2 * n_datasets) {
    case 0: return "mu0";
    case 1: return "sigma0";
    case 2: return "nu";
    case 3: return "alpha";
    default: return "beta";
  }
}

std::vector<double> Chains::pooled(std::size_t p) const {
  std::vector<double> out;
  out.reserve(n_chains() * n_draws());
  for (const auto& chain : draws)
    out.insert(out.end(), chain[p].begin(), chain[p].end());
  return out;
}

double Diagnostics::max_rhat() const {
  double worst = -kInf;
  for (const auto& d : params) worst = std::max(worst, d.rhat);
  return params.empty() ? std::numeric_limits<double>::quiet_NaN() : worst;
}

double Diagnostics::min_ess() const {
  double least = kInf;
  for (const auto& d : params) least = std::min(least, d.ess);
  return params.empty() ? 0.0 : least;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::x_better: return "x_better";
    case Verdict::y_better: return "y_better";
    case Verdict::rope: return "rope";
    case Verdict::no_decision: return "no_decision";
  }
  return "?";
}

double DecisionMatrix::decided_fraction() const {
  const std::size_t k = models.size();
  if (k < 2) return 0.0;
  std::size_t decided = 0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      if (i != j && cell(i, j) != Verdict::no_decision) ++decided;
  return static_cast<double>(decided) / static_cast<double>(k * (k - 1));
}

double rho_from_cv(const CvGeometry& geometry, bool* clamped) {
  if (geometry.n_train <= 0.0 || geometry.n_test <= 0.0)
    throw ValidationError("rho_from_cv: fold sizes must be positive");
  double rho = geometry.n_test / geometry.n_train;
  const bool clip = rho >= 1.0 - 1e-3;
  if (clip) rho = 1.0 - 1e-3;
  if (clamped) *clamped = clip;
  return rho;
}

double cs_gaussian_logpdf(std::span<const double> x, double mu, double sigma2,
                          double rho) {
  const std::size_t r = x.size();
  if (r < 2) throw ValidationError("cs_gaussian_logpdf: need r >= 2");
  if (!(rho > 0.0 && rho < 1.0))
    throw ValidationError("cs_gaussian_logpdf: rho must be inside (0,1)");
  if (!(sigma2 > 0.0)) throw ValidationError("cs_gaussian_logpdf: sigma2 must be > 0");

  const double rd = static_cast<double>(r);
  double sumd = 0.0, sumd2 = 0.0;
  for (double v : x) {
    const double d = v - mu;
    sumd += d;
    sumd2 += d * d;
  }
  const double c = rho / (1.0 + (rd - 1.0) * rho);
  const double quad = (sumd2 - c * sumd * sumd) / (sigma2 * (1.0 - rho));
  const double logdet = rd * std::log(sigma2) + (rd - 1.0) * std::log1p(-rho) +
                        std::log1p((rd - 1.0) * rho);
  return -0.5 * (rd * kLog2Pi + logdet + quad);
}

double hier_log_posterior(const HierState& state, const PairDifferences& diffs,
                          const HierPriors& priors) {
  const std::size_t n = diffs.per_dataset.size();
  if (state.mu_i.size() != n || state.sigma_i.size() != n)
    throw ValidationError("hier_log_posterior: state size mismatch");

  // Support checks first: outside any prior support the density is zero.
  if (!(state.mu_0 > priors.mu0_lo && state.mu_0 < priors.mu0_hi)) return -kInf;
  if (!(state.sigma_0 > 0.0 && state.sigma_0 < priors.sigma0_upper)) return -kInf;
  if (!(state.nu > 0.0)) return -kInf;
  if (!(state.alpha > priors.alpha_lo && state.alpha < priors.alpha_hi)) return -kInf;
  if (!(state.beta > priors.beta_lo && state.beta < priors.beta_hi)) return -kInf;
  const double sigma_floor = priors.sigma_i_floor();
  for (double s : state.sigma_i)
    if (!(s > sigma_floor && s < priors.sigma_i_upper)) return -kInf;

  double logp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    logp += cs_gaussian_logpdf(diffs.per_dataset[i], state.mu_i[i],
                               state.sigma_i[i] * state.sigma_i[i], priors.rho);
    logp += dist::student_logpdf(state.mu_i[i], state.mu_0, state.sigma_0, state.nu);
  }
  logp += -std::log(priors.mu0_hi - priors.mu0_lo);
  logp += -std::log(priors.sigma0_upper);
  logp += -static_cast<double>(n) * std::log(priors.sigma_i_upper - sigma_floor);
  logp += dist::gamma_logpdf(state.nu, state.alpha, state.beta);
  logp += -std::log(priors.alpha_hi - priors.alpha_lo);
  logp += -std::log(priors.beta_hi - priors.beta_lo);
  return logp;
}

Theta posterior_theta(const Chains& chains, double rope_halfwidth,
                      bool theta_from_mu0) {
  if (rope_halfwidth <= 0.0)
    throw ValidationError("posterior_theta: rope half-width must be positive");

  std::size_t left = 0, rope = 0, right = 0, total = 0;
  for (std::size_t c = 0; c < chains.n_chains(); ++c) {
    Rng rng = chains.end_rngs[c];  // continue the chain's own stream
    const auto& mu0 = chains.draws[c][chains.idx_mu0()];
    const auto& sigma0 = chains.draws[c][chains.idx_sigma0()];
    const auto& nu = chains.draws[c][chains.idx_nu()];
    for (std::size_t s = 0; s < mu0.size(); ++s) {
      const double predicted =
          theta_from_mu0 ? mu0[s] : mu0[s] + sigma0[s] * rng.student_t(nu[s]);
      if (predicted > rope_halfwidth) ++left;
      else if (predicted < -rope_halfwidth) ++right;
      else ++rope;
      ++total;
    }
  }
  if (total == 0) throw ValidationError("posterior_theta: empty chains");

  Theta theta;
  theta.p_left = static_cast<double>(left) / static_cast<double>(total);
  theta.p_rope = static_cast<double>(rope) / static_cast<double>(total);
  theta.p_right = static_cast<double>(right) / static_cast<double>(total);
  return theta;
}

std::vector<Theta> posterior_simplex_samples(const Chains& chains,
                                             double rope_halfwidth,
                                             std::size_t max_points) {
  const std::size_t total = chains.n_chains() * chains.n_draws();
  const std::size_t stride = std::max<std::size_t>(1, total / std::max<std::size_t>(1, max_points));
  std::vector<Theta> out;
  std::size_t index = 0;
  for (std::size_t c = 0; c < chains.n_chains(); ++c) {
    const auto& mu0 = chains.draws[c][chains.idx_mu0()];
    const auto& sigma0 = chains.draws[c][chains.idx_sigma0()];
    const auto& nu = chains.draws[c][chains.idx_nu()];
    for (std::size_t s = 0; s < mu0.size(); ++s, ++index) {
      if (index % stride != 0) continue;
      const double scale = std::max(sigma0[s], 1e-300);
      const double lo = dist::student_cdf((-rope_halfwidth - mu0[s]) / scale, nu[s]);
      const double hi = dist::student_cdf((rope_halfwidth - mu0[s]) / scale, nu[s]);
      Theta t;
      t.p_right = lo;           // mass below -rope: X worse
      t.p_rope = hi - lo;       // mass inside the ROPE
      t.p_left = 1.0 - hi;      // mass above +rope: X better
      out.push_back(t);
    }
  }
  return out;
}

namespace detail {
std::uint64_t pair_seed(std::uint64_t master_seed, const std::string& x,
                        const std::string& y) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a offset basis
  auto mix = [&h](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ULL;
    }
    h ^= 0x1f;  // separator so ("ab","c") differs from ("a","bc")
    h *= 1099511628211ULL;
  };
  mix(x);
  mix(y);
  return master_seed ^ h;
}
}  // namespace detail

PairPosterior compare_pair(const PerfTable& table, const std::string& x,
                           const std::string& y, const BayesConfig& config,
                           std::optional<HierPriors> priors_override,
                           bool keep_chains) {
  PairDifferences diffs = pair_differences(table, x, y);
  const HierPriors priors = priors_override.has_value()
                                ? *priors_override
                                : HierPriors::from_data(diffs, config.rho);

  PairPosterior out;
  out.model_x = x;
  out.model_y = y;
  out.rope_halfwidth = config.rope;
  out.seed = detail::pair_seed(config.seed, x, y);

  Chains chains = run_mcmc(diffs, priors, config.mcmc, out.seed);
  out.diagnostics = diagnostics(chains);
  out.reliable = out.diagnostics.rhat_available &&
                 out.diagnostics.max_rhat() <= config.rhat_limit;
  out.theta = posterior_theta(chains, config.rope, config.theta_from_mu0);
  if (keep_chains) out.chains = std::move(chains);
  return out;
}

namespace {

Verdict decide(const Theta& theta, double threshold, bool reliable) {
  if (!reliable) return Verdict::no_decision;
  if (theta.p_left > threshold) return Verdict::x_better;
  if (theta.p_right > threshold) return Verdict::y_better;
  if (theta.p_rope > threshold) return Verdict::rope;
  return Verdict::no_decision;
}

}  // namespace

DecisionMatrix bayes_decision_matrix(const PerfTable& table,
                                     const BayesConfig& config) {
  const std::size_t k = table.n_models();
  if (k < 2) throw ValidationError("decision matrix needs at least 2 models");

  DecisionMatrix matrix;
  matrix.models = table.models();
  matrix.threshold = config.threshold;
  matrix.rope = config.rope;
  matrix.cells.assign(k * k, Verdict::no_decision);
  for (std::size_t i = 0; i < k; ++i) matrix.cells[i * k + i] = Verdict::rope;

  struct PairTask {
    std::size_t i, j;
  };
  std::vector<PairTask> tasks;
  tasks.reserve(k * (k - 1) / 2);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) tasks.push_back({i, j});

  matrix.pair_summaries.resize(tasks.size());

  std::size_t jobs = config.jobs ? config.jobs : std::thread::hardware_concurrency();
  jobs = std::max<std::size_t>(1, std::min(jobs, tasks.size()));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string failure_message;
  std::mutex failure_mutex;

  auto worker = [&]() {
    while (true) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size() || failed.load()) break;
      try {
        const auto [i, j] = tasks[t];
        PairPosterior pp =
            compare_pair(table, table.models()[i], table.models()[j], config,
                         std::nullopt, /*keep_chains=*/false);
        DecisionMatrix::PairSummary& slot = matrix.pair_summaries[t];
        slot.i = i;
        slot.j = j;
        slot.theta = pp.theta;
        slot.max_rhat = pp.diagnostics.max_rhat();
        slot.min_ess = pp.diagnostics.min_ess();
        slot.reliable = pp.reliable;
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        failed.store(true);
        if (failure_message.empty()) failure_message = e.what();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load())
    throw Error("bayes_decision_matrix: pair comparison failed: " + failure_message);

  for (const auto& s : matrix.pair_summaries) {
    const Verdict v = decide(s.theta, config.threshold, s.reliable);
    matrix.cells[s.i * k + s.j] = v;
    Verdict mirrored = v;
    if (v == Verdict::x_better) mirrored = Verdict::y_better;
    else if (v == Verdict::y_better) mirrored = Verdict::x_better;
    matrix.cells[s.j * k + s.i] = mirrored;
  }
  return matrix;
}

FamilyOfBest bayes_family(const DecisionMatrix& matrix,
                          const std::vector<double>& means, bool higher_is_better) {
  const std::size_t k = matrix.models.size();
  if (means.size() != k)
    throw ValidationError("bayes_family: means size does not match matrix");

  std::size_t f1 = 0;
  for (std::size_t j = 1; j < k; ++j)
    if (higher_is_better ? means[j] > means[f1] : means[j] < means[f1]) f1 = j;

  std::vector<std::size_t> members{f1};
  for (std::size_t j = 0; j < k; ++j)
    if (j != f1 && matrix.cell(f1, j) == Verdict::rope) members.push_back(j);

  std::sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
    if (means[a] != means[b])
      return higher_is_better ? means[a] > means[b] : means[a] < means[b];
    return a < b;
  });

  FamilyOfBest family;
  family.method = EvalMethod::bayes;
  for (std::size_t idx : members) family.members.push_back(matrix.models[idx]);
  family.epistemic_note =
      "positively practically equivalent: each member's posterior probability "
      "of lying within the ROPE of the best model exceeds the decision "
      "threshold";
  return family;
}

}  // namespace modelcmp
