#include "oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracles {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol,
                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double norm_cdf(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }
double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// 32-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirror).
constexpr double kGlNodes[16] = {
    0.0483076656877383, 0.1444719615827965, 0.2392873622521371, 0.3318686022821277,
    0.4213512761306353, 0.5068999089322294, 0.5877157572407623, 0.6630442669302152,
    0.7321821187402897, 0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
    0.9349060759377397, 0.9647622555875064, 0.9856115115452684, 0.9972638618494816};
constexpr double kGlWeights[16] = {
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046, 0.0911738786957639,
    0.0876520930044038, 0.0833119242269467, 0.0781938957870703, 0.0723457941088485,
    0.0658222227763618, 0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057, 0.0070186100094701};

double gauss_legendre_panel(const std::function<double(double)>& f, double a,
                            double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < 16; ++i) {
    sum += kGlWeights[i] * f(mid + half * kGlNodes[i]);
    sum += kGlWeights[i] * f(mid - half * kGlNodes[i]);
  }
  return half * sum;
}

double range_cdf_oracle(double r, std::size_t k) {
  if (r <= 0.0) return 0.0;
  // Fixed 60-panel composite Gauss-Legendre over [-10, 10].
  const std::function<double(double)> f = [r, k](double z) {
    const double inner = norm_cdf(z) - norm_cdf(z - r);
    return inner <= 0.0 ? 0.0 : norm_pdf(z) * std::pow(inner, static_cast<double>(k - 1));
  };
  double total = 0.0;
  const int panels = 60;
  for (int p = 0; p < panels; ++p) {
    const double a = -10.0 + 20.0 * p / panels;
    const double b = -10.0 + 20.0 * (p + 1) / panels;
    total += gauss_legendre_panel(f, a, b);
  }
  return static_cast<double>(k) * total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

double dense_cs_mvn_logpdf(const std::vector<double>& x, double mu, double sigma2,
                           double rho) {
  const int r = static_cast<int>(x.size());
  Eigen::MatrixXd sigma(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j) sigma(i, j) = i == j ? sigma2 : rho * sigma2;
  Eigen::VectorXd d(r);
  for (int i = 0; i < r; ++i) d(i) = x[i] - mu;

  const Eigen::MatrixXd inverse = sigma.inverse();
  const double logdet = std::log(sigma.determinant());
  const double quad = d.dot(inverse * d);
  return -0.5 * (r * kLog2Pi + logdet + quad);
}

double cs_inverse_residual(std::size_t r, double sigma2, double rho) {
  const int n = static_cast<int>(r);
  Eigen::MatrixXd sigma(n, n), inv(n, n);
  const double a = 1.0 / (sigma2 * (1.0 - rho));
  const double c = rho / (1.0 + (static_cast<double>(r) - 1.0) * rho);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      sigma(i, j) = i == j ? sigma2 : rho * sigma2;
      inv(i, j) = a * ((i == j ? 1.0 : 0.0) - c);
    }
  const Eigen::MatrixXd residual =
      sigma * inv - Eigen::MatrixXd::Identity(n, n);
  return residual.cwiseAbs().maxCoeff();
}

double chi_square_tail_by_quadrature(double x, std::size_t dof) {
  const double k = static_cast<double>(dof);
  const double log_norm = -(k / 2.0) * std::log(2.0) - std::lgamma(k / 2.0);
  const auto density = [&](double t) {
    return t <= 0.0 ? 0.0 : std::exp(log_norm + (k / 2.0 - 1.0) * std::log(t) - t / 2.0);
  };
  const double hi = x + std::max(200.0, 20.0 * std::sqrt(2.0 * k) + 2.0 * k);
  return integrate(density, x, hi, 1e-13);
}

double studentized_range_quantile_oracle(std::size_t k, double alpha) {
  const double target = 1.0 - alpha;
  double lo = 0.0, hi = 4.0;
  while (range_cdf_oracle(hi, k) < target) {
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (range_cdf_oracle(mid, k) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi) / std::sqrt(2.0);
}

double student_cdf_by_quadrature(double t, double dof) {
  const double log_norm = std::lgamma((dof + 1.0) / 2.0) - std::lgamma(dof / 2.0) -
                          0.5 * std::log(dof * M_PI);
  const auto density = [&](double u) {
    return std::exp(log_norm - (dof + 1.0) / 2.0 * std::log1p(u * u / dof));
  };
  if (t >= 0.0) return 0.5 + integrate(density, 0.0, std::min(t, 80.0), 1e-12);
  return 0.5 - integrate(density, std::max(t, -80.0), 0.0, 1e-12);
}

std::vector<double> mid_ranks_by_permutation(const std::vector<double>& scores,
                                             bool higher_is_better) {
  const std::size_t n = scores.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<double> rank_sum(n, 0.0);
  std::size_t count = 0;
  do {
    // Competition ranking with ties broken by the permutation's order.
    std::vector<std::size_t> order = perm;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return higher_is_better ? scores[a] > scores[b] : scores[a] < scores[b];
    });
    for (std::size_t pos = 0; pos < n; ++pos)
      rank_sum[order[pos]] += static_cast<double>(pos + 1);
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (double& v : rank_sum) v /= static_cast<double>(count);
  return rank_sum;
}

std::vector<std::pair<std::size_t, std::size_t>> cd_groups_brute_force(
    const std::vector<double>& sorted_ranks, double cd) {
  const std::size_t k = sorted_ranks.size();
  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k; ++b)
      if (sorted_ranks[b] - sorted_ranks[a] <= cd) all.emplace_back(a, b);

  std::vector<std::pair<std::size_t, std::size_t>> maximal;
  for (const auto& g : all) {
    bool contained = false;
    for (const auto& h : all)
      if (h != g && h.first <= g.first && g.second <= h.second) contained = true;
    if (!contained) maximal.push_back(g);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

}  // namespace oracles
