#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/distributions.hpp"
#include "modelcmp/errors.hpp"
#include "modelcmp/mcmc_detail.hpp"

namespace modelcmp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kLogPi = 1.1447298858494002;
// log of the smallest value uniform() can return; below this an MH proposal
// can never be accepted, so the draw is skipped.
constexpr double kLogMinUniform = -37.5;

/// Per-coordinate random-walk Metropolis over the hierarchical posterior.
/// Every coordinate update is O(1) thanks to per-dataset sufficient
/// statistics (ss_i, mean_i) and a cached sum of the t-prior log terms.
class HierSampler {
 public:
  HierSampler(const PairDifferences& diffs, const HierPriors& priors, Rng rng)
      : priors_(priors), rng_(rng), n_(diffs.per_dataset.size()) {
    if (n_ == 0) throw ValidationError("run_mcmc: no datasets");
    r_ = static_cast<double>(diffs.per_dataset.front().size());
    if (r_ < 2) throw ValidationError("run_mcmc: need at least 2 folds");
    if (!(priors_.rho > 0.0 && priors_.rho < 1.0))
      throw ValidationError("run_mcmc: rho must be inside (0,1)");

    // Sufficient statistics per dataset.
    mean_.resize(n_);
    ss_.resize(n_);
    sd_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      const auto& x = diffs.per_dataset[i];
      if (static_cast<double>(x.size()) != r_)
        throw ValidationError("run_mcmc: ragged difference vectors");
      double m = std::accumulate(x.begin(), x.end(), 0.0) / r_;
      double ss = 0.0;
      for (double v : x) ss += (v - m) * (v - m);
      mean_[i] = m;
      ss_[i] = ss;
      sd_[i] = std::sqrt(ss / (r_ - 1.0));
    }

    const double rho = priors_.rho;
    c_rho_ = rho / (1.0 + (r_ - 1.0) * rho);
    one_minus_rho_ = 1.0 - rho;
    q_coef_ = r_ * (1.0 - c_rho_ * r_);
    logdet_const_ = (r_ - 1.0) * std::log1p(-rho) + std::log1p((r_ - 1.0) * rho);

    init_state();
    init_caches();
    init_steps();
    if (!std::isfinite(probe_log_posterior()))
      throw Error("run_mcmc: non-finite log-posterior at initialization");
  }

  void sweep() {
    for (std::size_t i = 0; i < n_; ++i) update_mu(i);
    for (std::size_t i = 0; i < n_; ++i) update_sigma(i);
    update_mu0();
    update_sigma0();
    update_nu();
    update_alpha();
    update_beta();
    // Group moves along the funnel axes: without them sigma_0 and mu_0 mix
    // geometrically slowly once sigma_0 drops below the data resolution.
    update_translate();
    update_scale();
  }

  /// Rescales proposal steps toward 20-50% acceptance; burn-in only.
  void adapt() {
    for (std::size_t p = 0; p < step_.size(); ++p) {
      if (tries_[p] == 0) continue;
      const double rate = static_cast<double>(accepts_[p]) / tries_[p];
      if (rate < 0.20) step_[p] *= 0.75;
      else if (rate > 0.50) step_[p] *= 4.0 / 3.0;
      step_[p] = std::clamp(step_[p], 1e-300, 1e6);
      accepts_[p] = 0;
      tries_[p] = 0;
    }
  }

  void record(std::vector<std::vector<double>>& chain) const {
    std::size_t p = 0;
    for (std::size_t i = 0; i < n_; ++i) chain[p++].push_back(mu_[i]);
    for (std::size_t i = 0; i < n_; ++i) chain[p++].push_back(sig_[i]);
    chain[p++].push_back(mu0_);
    chain[p++].push_back(sig0_);
    chain[p++].push_back(nu_);
    chain[p++].push_back(alpha_);
    chain[p++].push_back(beta_);
  }

  const Rng& rng() const { return rng_; }

  HierState state() const {
    HierState s;
    s.mu_i = mu_;
    s.sigma_i = sig_;
    s.mu_0 = mu0_;
    s.sigma_0 = sig0_;
    s.nu = nu_;
    s.alpha = alpha_;
    s.beta = beta_;
    return s;
  }

  /// Full log posterior from current parameters and incremental caches
  /// (quad via the exact sufficient-stat form, t terms via l_sum_).
  double probe_log_posterior() const {
    double logp = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double s2 = sig_[i] * sig_[i];
      logp += -0.5 * (r_ * kLog2Pi + r_ * std::log(s2) + logdet_const_ +
                      quad(i, mu_[i]) / (s2 * one_minus_rho_));
    }
    const double nd = static_cast<double>(n_);
    logp += nd * (std::lgamma((nu_ + 1.0) / 2.0) - std::lgamma(nu_ / 2.0) -
                  0.5 * std::log(nu_) - 0.5 * kLogPi - std::log(sig0_));
    logp += -half_nup1_ * l_sum_;
    logp += -std::log(priors_.mu0_hi - priors_.mu0_lo);
    logp += -std::log(priors_.sigma0_upper);
    logp += -nd * std::log(priors_.sigma_i_upper - priors_.sigma_i_floor());
    logp += dist::gamma_logpdf(nu_, alpha_, beta_);
    logp += -std::log(priors_.alpha_hi - priors_.alpha_lo);
    logp += -std::log(priors_.beta_hi - priors_.beta_lo);
    return logp;
  }

 private:
  // quad(i, m) = (x_i - m)' (I - cJ) (x_i - m) without cancellation.
  double quad(std::size_t i, double m) const {
    const double d = m - mean_[i];
    return ss_[i] + q_coef_ * d * d;
  }

  double sum_t_logs(double center, double w) const {
    // Sum of log(1 + w (mu_i - center)^2) as log of chunked products;
    // one or two log calls instead of N.
    double acc = 0.0, prod = 1.0;
    int in_chunk = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double d = mu_[i] - center;
      prod *= 1.0 + w * d * d;
      if (++in_chunk == 24 || prod > 1e280) {
        acc += std::log(prod);
        prod = 1.0;
        in_chunk = 0;
      }
    }
    return acc + std::log(prod);
  }

  bool mh_accept(double delta, std::size_t p) {
    ++tries_[p];
    if (delta >= 0.0) {
      ++accepts_[p];
      return true;
    }
    if (delta < kLogMinUniform) return false;
    if (std::log(rng_.uniform()) < delta) {
      ++accepts_[p];
      return true;
    }
    return false;
  }

  void update_mu(std::size_t i) {
    const double cur = mu_[i];
    const double prop = cur + step_[i] * rng_.normal();
    const double dlik =
        -0.5 * inv_[i] * q_coef_ *
        ((prop - mean_[i]) * (prop - mean_[i]) - (cur - mean_[i]) * (cur - mean_[i]));
    const double dc = cur - mu0_, dp = prop - mu0_;
    const double lratio = std::log((1.0 + w_ * dp * dp) / (1.0 + w_ * dc * dc));
    if (mh_accept(dlik - half_nup1_ * lratio, i)) {
      mu_[i] = prop;
      l_sum_ += lratio;
    }
  }

  void update_sigma(std::size_t i) {
    // Log-scale proposal: multiplicative moves handle the posterior's sharp
    // left flank near sigma -> 0 that linear steps cannot traverse.
    const std::size_t p = n_ + i;
    const double cur = sig_[i];
    const double log_step = step_[p] * rng_.normal();
    const double prop = cur * std::exp(log_step);
    if (prop <= sig_floor_ || prop >= priors_.sigma_i_upper) {
      ++tries_[p];
      return;
    }
    const double inv_prop = 1.0 / (prop * prop * one_minus_rho_);
    const double delta = -r_ * log_step -
                         0.5 * quad(i, mu_[i]) * (inv_prop - inv_[i]) +
                         log_step;  // Jacobian of the log transform
    if (mh_accept(delta, p)) {
      sig_[i] = prop;
      inv_[i] = inv_prop;
    }
  }

  void update_mu0() {
    const std::size_t p = 2 * n_;
    const double prop = mu0_ + step_[p] * rng_.normal();
    if (prop <= priors_.mu0_lo || prop >= priors_.mu0_hi) {
      ++tries_[p];
      return;
    }
    const double sum_prop = sum_t_logs(prop, w_);
    if (mh_accept(-half_nup1_ * (sum_prop - l_sum_), p)) {
      mu0_ = prop;
      l_sum_ = sum_prop;
    }
  }

  void update_sigma0() {
    const std::size_t p = 2 * n_ + 1;
    const double cur = sig0_;
    const double log_step = step_[p] * rng_.normal();
    const double prop = cur * std::exp(log_step);
    if (prop <= 0.0 || prop >= priors_.sigma0_upper) {
      ++tries_[p];
      return;
    }
    const double w_prop = 1.0 / (nu_ * prop * prop);
    const double sum_prop = sum_t_logs(mu0_, w_prop);
    const double delta = -static_cast<double>(n_) * log_step -
                         half_nup1_ * (sum_prop - l_sum_) +
                         log_step;  // Jacobian of the log transform
    if (mh_accept(delta, p)) {
      sig0_ = prop;
      w_ = w_prop;
      l_sum_ = sum_prop;
    }
  }

  void update_nu() {
    const std::size_t p = 2 * n_ + 2;
    const double lnu_prop = lnu_ + step_[p] * rng_.normal();
    const double nu_prop = std::exp(lnu_prop);
    if (!(nu_prop > 0.0) || !std::isfinite(nu_prop)) {
      ++tries_[p];
      return;
    }
    const double w_prop = 1.0 / (nu_prop * sig0_ * sig0_);
    const double sum_prop = sum_t_logs(mu0_, w_prop);
    const double tnorm_prop = std::lgamma((nu_prop + 1.0) / 2.0) -
                              std::lgamma(nu_prop / 2.0) - 0.5 * lnu_prop;
    const double half_prop = (nu_prop + 1.0) / 2.0;
    double delta = static_cast<double>(n_) * (tnorm_prop - tnorm_nu_) -
                   (half_prop * sum_prop - half_nup1_ * l_sum_);
    delta += (alpha_ - 1.0) * (lnu_prop - lnu_) - beta_ * (nu_prop - nu_);
    delta += lnu_prop - lnu_;  // log-scale proposal Jacobian
    if (mh_accept(delta, p)) {
      nu_ = nu_prop;
      lnu_ = lnu_prop;
      w_ = w_prop;
      l_sum_ = sum_prop;
      half_nup1_ = half_prop;
      tnorm_nu_ = tnorm_prop;
    }
  }

  void update_alpha() {
    const std::size_t p = 2 * n_ + 3;
    const double prop = alpha_ + step_[p] * rng_.normal();
    if (prop <= priors_.alpha_lo || prop >= priors_.alpha_hi) {
      ++tries_[p];
      return;
    }
    const double lgamma_prop = std::lgamma(prop);
    const double delta =
        (prop - alpha_) * (log_beta_ + lnu_) - lgamma_prop + lgamma_alpha_;
    if (mh_accept(delta, p)) {
      alpha_ = prop;
      lgamma_alpha_ = lgamma_prop;
    }
  }

  void update_beta() {
    const std::size_t p = 2 * n_ + 4;
    const double prop = beta_ + step_[p] * rng_.normal();
    if (prop <= priors_.beta_lo || prop >= priors_.beta_hi) {
      ++tries_[p];
      return;
    }
    const double log_prop = std::log(prop);
    const double delta = alpha_ * (log_prop - log_beta_) - (prop - beta_) * nu_;
    if (mh_accept(delta, p)) {
      beta_ = prop;
      log_beta_ = log_prop;
    }
  }

  // Shifts mu_0 and every mu_i together. The t terms are invariant, only
  // the data likelihood changes; volume-preserving, so no Jacobian.
  void update_translate() {
    const std::size_t p = 2 * n_ + 5;
    const double shift = step_[p] * rng_.normal();
    const double mu0_prop = mu0_ + shift;
    if (mu0_prop <= priors_.mu0_lo || mu0_prop >= priors_.mu0_hi) {
      ++tries_[p];
      return;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double d_cur = mu_[i] - mean_[i];
      const double d_prop = d_cur + shift;
      delta += -0.5 * inv_[i] * q_coef_ * (d_prop * d_prop - d_cur * d_cur);
    }
    if (mh_accept(delta, p)) {
      for (std::size_t i = 0; i < n_; ++i) mu_[i] += shift;
      mu0_ = mu0_prop;
    }
  }

  // Rescales sigma_0 and the spread of the mu_i around mu_0 by a common
  // factor c: the standardized residuals z_i are invariant, so the t sum
  // keeps its value and only -N log sigma_0, the likelihood, and the
  // c^(N+1) transformation Jacobian enter the ratio.
  void update_scale() {
    const std::size_t p = 2 * n_ + 6;
    const double log_c = step_[p] * rng_.normal();
    const double c = std::exp(log_c);
    const double sig0_prop = sig0_ * c;
    if (sig0_prop <= 0.0 || sig0_prop >= priors_.sigma0_upper) {
      ++tries_[p];
      return;
    }
    double delta = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double d_cur = mu_[i] - mean_[i];
      const double d_prop = mu0_ + c * (mu_[i] - mu0_) - mean_[i];
      delta += -0.5 * inv_[i] * q_coef_ * (d_prop * d_prop - d_cur * d_cur);
    }
    delta += -static_cast<double>(n_) * log_c;           // t normalization
    delta += (static_cast<double>(n_) + 1.0) * log_c;    // Jacobian
    if (mh_accept(delta, p)) {
      for (std::size_t i = 0; i < n_; ++i) mu_[i] = mu0_ + c * (mu_[i] - mu0_);
      sig0_ = sig0_prop;
      w_ = 1.0 / (nu_ * sig0_ * sig0_);
      l_sum_ = sum_t_logs(mu0_, w_);  // refresh: invariant in exact math
    }
  }

  void init_state() {
    sig_floor_ = priors_.sigma_i_floor();
    mu_.resize(n_);
    sig_.resize(n_);
    double mean_of_means = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double scale = std::max(sd_[i], 1e-6);
      mu_[i] = mean_[i] + 0.5 * scale / std::sqrt(r_) * rng_.normal();
      const double raw = std::max(sd_[i], 1e-6) * std::exp(0.3 * rng_.normal());
      sig_[i] = std::clamp(raw, 2.0 * sig_floor_, 0.9 * priors_.sigma_i_upper);
      mean_of_means += mean_[i];
    }
    mean_of_means /= static_cast<double>(n_);

    double spread = 0.0;
    if (n_ > 1) {
      for (std::size_t i = 0; i < n_; ++i)
        spread += (mean_[i] - mean_of_means) * (mean_[i] - mean_of_means);
      spread = std::sqrt(spread / static_cast<double>(n_ - 1));
    } else {
      spread = std::max(sd_[0], 1e-6) / std::sqrt(r_);
    }
    spread = std::max(spread, 1e-7);
    spread_ = spread;

    mu0_ = std::clamp(
        mean_of_means + 0.5 * spread / std::sqrt(static_cast<double>(n_)) * rng_.normal(),
        0.99 * priors_.mu0_lo, 0.99 * priors_.mu0_hi);
    sig0_ = std::clamp(spread * std::exp(0.3 * rng_.normal()), 1e-9,
                       0.9 * priors_.sigma0_upper);
    nu_ = std::exp(rng_.uniform(std::log(2.0), std::log(30.0)));
    lnu_ = std::log(nu_);
    alpha_ = rng_.uniform(1.0, 4.0);
    beta_ = rng_.uniform(0.07, 0.13);
  }

  void init_caches() {
    inv_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i)
      inv_[i] = 1.0 / (sig_[i] * sig_[i] * one_minus_rho_);
    w_ = 1.0 / (nu_ * sig0_ * sig0_);
    l_sum_ = sum_t_logs(mu0_, w_);
    half_nup1_ = (nu_ + 1.0) / 2.0;
    tnorm_nu_ = std::lgamma((nu_ + 1.0) / 2.0) - std::lgamma(nu_ / 2.0) - 0.5 * lnu_;
    lgamma_alpha_ = std::lgamma(alpha_);
    log_beta_ = std::log(beta_);
  }

  void init_steps() {
    const std::size_t n_params = 2 * n_ + 7;  // coordinates + 2 group moves
    step_.assign(n_params, 0.1);
    accepts_.assign(n_params, 0);
    tries_.assign(n_params, 0);
    for (std::size_t i = 0; i < n_; ++i) {
      const double scale = std::max(sd_[i], 1e-6);
      step_[i] = 2.4 * scale / std::sqrt(r_);
      step_[n_ + i] = 0.5;  // log sigma_i
    }
    step_[2 * n_] = 2.0 * spread_ / std::sqrt(static_cast<double>(n_));
    step_[2 * n_ + 1] = 0.8;   // log sigma_0
    step_[2 * n_ + 2] = 0.6;   // log nu
    step_[2 * n_ + 3] = 0.5;   // alpha
    step_[2 * n_ + 4] = 0.015; // beta
    step_[2 * n_ + 5] = spread_ / std::sqrt(static_cast<double>(n_));  // translate
    step_[2 * n_ + 6] = 0.5;   // log scale factor
  }

  HierPriors priors_;
  Rng rng_;
  std::size_t n_;
  double r_ = 0.0;

  // data sufficient statistics
  std::vector<double> mean_, ss_, sd_;

  // covariance constants
  double c_rho_ = 0.0, one_minus_rho_ = 1.0, q_coef_ = 0.0, logdet_const_ = 0.0;

  // state
  std::vector<double> mu_, sig_;
  double mu0_ = 0.0, sig0_ = 1.0, nu_ = 5.0, lnu_ = 0.0, alpha_ = 2.0, beta_ = 0.1;

  // caches
  std::vector<double> inv_;  // 1 / (sigma_i^2 (1-rho))
  double w_ = 1.0;           // 1 / (nu sigma_0^2)
  double l_sum_ = 0.0;       // sum_i log(1 + w (mu_i - mu_0)^2)
  double half_nup1_ = 3.0;   // (nu+1)/2
  double tnorm_nu_ = 0.0;    // lgamma((nu+1)/2) - lgamma(nu/2) - log(nu)/2
  double lgamma_alpha_ = 0.0, log_beta_ = 0.0;
  double sig_floor_ = 0.0, spread_ = 1.0;

  // adaptation
  std::vector<double> step_;
  std::vector<std::uint32_t> accepts_, tries_;
};

}  // namespace

Chains run_mcmc(const PairDifferences& diffs, const HierPriors& priors,
                const McmcConfig& config, std::uint64_t seed) {
  if (config.chains == 0) throw ValidationError("run_mcmc: need at least 1 chain");
  if (config.total_draws == 0) throw ValidationError("run_mcmc: need draws > 0");

  Chains chains;
  chains.n_datasets = diffs.per_dataset.size();
  const std::size_t per_chain = config.draws_per_chain();
  const std::size_t n_params = chains.n_params();

  Rng master(seed);
  for (std::size_t c = 0; c < config.chains; ++c) {
    HierSampler sampler(diffs, priors, master.fork(c));

    const std::size_t window = std::max<std::size_t>(1, config.adapt_window);
    for (std::size_t s = 0; s < config.burn_in; ++s) {
      sampler.sweep();
      if ((s + 1) % window == 0) sampler.adapt();
    }

    std::vector<std::vector<double>> storage(n_params);
    for (auto& column : storage) column.reserve(per_chain);
    for (std::size_t s = 0; s < per_chain; ++s) {
      sampler.sweep();
      sampler.record(storage);
    }
    chains.draws.push_back(std::move(storage));
    chains.end_rngs.push_back(sampler.rng());
  }
  return chains;
}

namespace detail {

SamplerProbe run_sampler_probe(const PairDifferences& diffs, const HierPriors& priors,
                               std::uint64_t seed, std::size_t sweeps) {
  HierSampler sampler(diffs, priors, Rng(seed));
  for (std::size_t s = 0; s < sweeps; ++s) {
    sampler.sweep();
    if ((s + 1) % 50 == 0) sampler.adapt();
  }
  SamplerProbe probe;
  probe.state = sampler.state();
  probe.cached_log_posterior = sampler.probe_log_posterior();
  return probe;
}

}  // namespace detail

}  // namespace modelcmp
