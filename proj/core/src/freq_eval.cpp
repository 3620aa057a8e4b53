#include "modelcmp/freq_eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "modelcmp/distributions.hpp"
#include "modelcmp/errors.hpp"

namespace modelcmp {

namespace {

// Integrand of the range-of-k-normals CDF: phi(z) * [Phi(z) - Phi(z-r)]^(k-1).
// Beyond |z| ~ 12 the factor phi(z) underflows any contribution.
constexpr double kZLo = -12.0, kZHi = 12.0;

double range_integrand(double z, double r, std::size_t k) {
  const double inner = dist::normal_cdf(z) - dist::normal_cdf(z - r);
  if (inner <= 0.0) return 0.0;
  return dist::normal_pdf(z) * std::pow(inner, static_cast<double>(k - 1));
}

double adaptive_simpson_rec(double (*f)(double, double, std::size_t), double r,
                            std::size_t k, double a, double b, double fa, double fm,
                            double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm, r, k), frm = f(rm, r, k);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson_rec(f, r, k, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_rec(f, r, k, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Adaptive Simpson over [a,b] split into unit-width panels so the bell-shaped
// integrand cannot be missed by a too-coarse first pass.
double integrate_range_cdf_kernel(double r, std::size_t k, double tol) {
  double total = 0.0;
  const int panels = static_cast<int>(kZHi - kZLo);
  const double per_panel_tol = tol / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = kZLo + p, b = a + 1.0;
    const double m = 0.5 * (a + b);
    const double fa = range_integrand(a, r, k), fm = range_integrand(m, r, k),
                 fb = range_integrand(b, r, k);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    total += adaptive_simpson_rec(range_integrand, r, k, a, b, fa, fm, fb, whole,
                                  per_panel_tol, 40);
  }
  return total;
}

// CDF of the range of k independent standard normals.
double range_cdf(double r, std::size_t k) {
  if (r <= 0.0) return 0.0;
  return static_cast<double>(k) * integrate_range_cdf_kernel(r, k, 1e-10);
}

}  // namespace

FriedmanOutcome friedman_statistic(const RankMatrix& ranks, std::size_t n_datasets) {
  const std::size_t k = ranks.avg_ranks.size();
  if (n_datasets < 2)
    throw ValidationError("Friedman test needs at least 2 datasets, got " +
                          std::to_string(n_datasets));
  if (k < 2)
    throw ValidationError("Friedman test needs at least 2 models, got " +
                          std::to_string(k));

  const double N = static_cast<double>(n_datasets);
  const double kd = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double rj : ranks.avg_ranks) sum_sq += rj * rj;

  FriedmanOutcome out;
  out.statistic = 12.0 * N / (kd * (kd + 1.0)) * (sum_sq - kd * (kd + 1.0) * (kd + 1.0) / 4.0);
  // Guard against tiny negative values from cancellation in the tied case.
  if (out.statistic < 0.0 && out.statistic > -1e-9) out.statistic = 0.0;
  out.dof = k - 1;
  out.p_value = chi_square_upper_tail(out.statistic, out.dof);
  out.n_datasets = n_datasets;
  out.n_models = k;
  return out;
}

double chi_square_upper_tail(double x, std::size_t dof) {
  if (x < 0.0) throw ValidationError("chi_square_upper_tail: x must be >= 0");
  if (dof == 0) throw ValidationError("chi_square_upper_tail: dof must be >= 1");
  return dist::reg_gamma_q(static_cast<double>(dof) / 2.0, x / 2.0);
}

double studentized_range_quantile(std::size_t k, double alpha) {
  if (k < 2)
    throw ValidationError("studentized_range_quantile: k must be >= 2, got " +
                          std::to_string(k));
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("studentized_range_quantile: alpha must be in (0,1)");

  static std::map<std::pair<std::size_t, double>, double> cache;
  static std::mutex cache_mutex;
  {
    std::lock_guard lock(cache_mutex);
    auto it = cache.find({k, alpha});
    if (it != cache.end()) return it->second;
  }

  const double target = 1.0 - alpha;
  double lo = 0.0, hi = 4.0;
  while (range_cdf(hi, k) < target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 128.0)
      throw ValidationError("studentized_range_quantile: bracket expansion failed");
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    if (range_cdf(mid, k) < target) lo = mid;
    else hi = mid;
  }
  const double q = 0.5 * (lo + hi) / std::sqrt(2.0);

  std::lock_guard lock(cache_mutex);
  cache.emplace(std::make_pair(k, alpha), q);
  return q;
}

NemenyiOutcome nemenyi(const RankMatrix& ranks, std::size_t n_datasets, double alpha) {
  const std::size_t k = ranks.avg_ranks.size();
  if (n_datasets < 2)
    throw ValidationError("Nemenyi test needs at least 2 datasets");
  if (k < 2) throw ValidationError("Nemenyi test needs at least 2 models");

  NemenyiOutcome out;
  out.alpha = alpha;
  out.q_alpha = studentized_range_quantile(k, alpha);
  const double kd = static_cast<double>(k);
  out.cd = out.q_alpha * std::sqrt(kd * (kd + 1.0) / (6.0 * static_cast<double>(n_datasets)));
  out.significant.assign(k, std::vector<bool>(k, false));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) {
      const bool sig = std::abs(ranks.avg_ranks[i] - ranks.avg_ranks[j]) > out.cd;
      out.significant[i][j] = sig;
      out.significant[j][i] = sig;
    }
  return out;
}

FamilyOfBest nhst_family(const RankMatrix& ranks,
                         const std::vector<std::string>& models,
                         const FriedmanOutcome& omnibus, const NemenyiOutcome& posthoc,
                         bool force) {
  if (!force && !(omnibus.p_value < posthoc.alpha))
    throw OmnibusRetainedError(
        "omnibus retained H0 (Friedman p = " + std::to_string(omnibus.p_value) +
        " >= alpha = " + std::to_string(posthoc.alpha) +
        "); the post-hoc family is undefined");

  const std::size_t k = ranks.avg_ranks.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  // Ascending average rank; ties on the top rank resolve to the
  // lexicographically first model id, and the tie is surfaced by the report.
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (ranks.avg_ranks[a] != ranks.avg_ranks[b])
      return ranks.avg_ranks[a] < ranks.avg_ranks[b];
    return models[a] < models[b];
  });

  const double best_rank = ranks.avg_ranks[order[0]];
  FamilyOfBest family;
  family.method = EvalMethod::nhst;
  for (std::size_t idx : order)
    if (ranks.avg_ranks[idx] - best_rank < posthoc.cd)
      family.members.push_back(models[idx]);
  family.epistemic_note =
      "no-conclusion semantics: the experimental data is not sufficient to "
      "distinguish these models from the top-ranked one; equivalence is not "
      "established";
  return family;
}

}  // namespace modelcmp
