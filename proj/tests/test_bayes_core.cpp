#include <doctest.h>

#include <cmath>

#include "modelcmp/bayes_eval.hpp"
#include "modelcmp/distributions.hpp"
#include "modelcmp/errors.hpp"
#include "modelcmp/rng.hpp"
#include "oracles.hpp"

using namespace modelcmp;

TEST_CASE("rho_from_cv computes the fold-overlap ratio") {
  SUBCASE("10-fold CV on 1000 instances") {
    bool clamped = true;
    CHECK(rho_from_cv({900.0, 100.0}, &clamped) == doctest::Approx(1.0 / 9.0));
    CHECK_FALSE(clamped);
  }
  SUBCASE("2-fold CV clamps with a warning flag") {
    bool clamped = false;
    CHECK(rho_from_cv({500.0, 500.0}, &clamped) == doctest::Approx(0.999));
    CHECK(clamped);
  }
  SUBCASE("strictly decreasing in n_train") {
    double prev = 2.0;
    for (double n_train : {200.0, 400.0, 800.0, 1600.0}) {
      const double rho = rho_from_cv({n_train, 100.0});
      CHECK(rho < prev);
      prev = rho;
    }
  }
  CHECK_THROWS_AS(rho_from_cv({0.0, 10.0}), ValidationError);
}

TEST_CASE("cs_gaussian_logpdf against the dense matrix oracle") {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t r = 2 + rng.next_u64() % 19;
    const double sigma2 = rng.uniform(0.01, 4.0);
    const double rho = rng.uniform(0.02, 0.95);
    const double mu = rng.uniform(-0.5, 0.5);
    std::vector<double> x(r);
    for (double& v : x) v = mu + rng.normal() * std::sqrt(sigma2);

    const double closed = cs_gaussian_logpdf(x, mu, sigma2, rho);
    const double dense = oracles::dense_cs_mvn_logpdf(x, mu, sigma2, rho);
    CHECK(closed == doctest::Approx(dense).epsilon(1e-10));
  }
}

TEST_CASE("cs_gaussian_logpdf limits and symmetry") {
  SUBCASE("independence limit at rho -> 0") {
    const std::vector<double> x{0.0, 0.0};
    const double lp = cs_gaussian_logpdf(x, 0.0, 1.0, 1e-12);
    CHECK(lp == doctest::Approx(-std::log(2.0 * M_PI)).epsilon(1e-9));
  }
  SUBCASE("reflection of the residuals leaves the density unchanged") {
    Rng rng(88);
    std::vector<double> x(6), reflected(6);
    const double mu = 0.2;
    for (std::size_t i = 0; i < 6; ++i) {
      x[i] = mu + 0.1 * rng.normal();
      reflected[i] = 2.0 * mu - x[i];
    }
    CHECK(cs_gaussian_logpdf(x, mu, 0.03, 0.4) ==
          doctest::Approx(cs_gaussian_logpdf(reflected, mu, 0.03, 0.4)).epsilon(1e-12));
  }
  SUBCASE("argument validation") {
    const std::vector<double> x{0.1, 0.2};
    CHECK_THROWS_AS(cs_gaussian_logpdf(x, 0.0, -1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(cs_gaussian_logpdf(x, 0.0, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(cs_gaussian_logpdf(std::vector<double>{1.0}, 0.0, 1.0, 0.5),
                    ValidationError);
  }
}

TEST_CASE("closed-form compound-symmetry inverse is exact") {
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t r = 2 + rng.next_u64() % 19;
    const double sigma2 = rng.uniform(1e-3, 10.0);
    const double rho = rng.uniform(0.01, 0.99);
    CHECK(oracles::cs_inverse_residual(r, sigma2, rho) < 1e-10);
  }
}

namespace {

PairDifferences synthetic_diffs(std::uint64_t seed, std::size_t n, std::size_t r) {
  Rng rng(seed);
  PairDifferences diffs;
  diffs.model_x = "a";
  diffs.model_y = "b";
  diffs.per_dataset.resize(n);
  for (auto& x : diffs.per_dataset) {
    x.resize(r);
    const double mu = 0.02 + 0.01 * rng.normal();
    for (double& v : x) v = mu + 0.05 * rng.normal();
  }
  return diffs;
}

HierState state_inside(const HierPriors& priors, const PairDifferences& diffs,
                       Rng& rng) {
  HierState s;
  const std::size_t n = diffs.per_dataset.size();
  s.mu_i.resize(n);
  s.sigma_i.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.mu_i[i] = rng.uniform(-0.2, 0.2);
    s.sigma_i[i] = rng.uniform(0.01, 0.2);
  }
  s.mu_0 = rng.uniform(-0.3, 0.3);
  s.sigma_0 = rng.uniform(0.005, 0.5);
  s.nu = rng.uniform(2.0, 40.0);
  s.alpha = rng.uniform(0.6, 4.9);
  s.beta = rng.uniform(0.06, 0.14);
  (void)priors;
  return s;
}

}  // namespace

TEST_CASE("hier_log_posterior support violations return -inf") {
  const PairDifferences diffs = synthetic_diffs(1, 5, 8);
  const HierPriors priors = HierPriors::from_data(diffs, 1.0 / 9.0);
  Rng rng(2);
  HierState s = state_inside(priors, diffs, rng);
  CHECK(std::isfinite(hier_log_posterior(s, diffs, priors)));

  HierState bad = s;
  bad.mu_0 = 1.5;
  CHECK(hier_log_posterior(bad, diffs, priors) ==
        -std::numeric_limits<double>::infinity());
  bad = s;
  bad.sigma_0 = priors.sigma0_upper * 1.01;
  CHECK(hier_log_posterior(bad, diffs, priors) ==
        -std::numeric_limits<double>::infinity());
  bad = s;
  bad.sigma_i[2] = priors.sigma_i_upper * 2.0;
  CHECK(hier_log_posterior(bad, diffs, priors) ==
        -std::numeric_limits<double>::infinity());
  bad = s;
  bad.alpha = 0.4;
  CHECK(hier_log_posterior(bad, diffs, priors) ==
        -std::numeric_limits<double>::infinity());
  bad = s;
  bad.beta = 0.2;
  CHECK(hier_log_posterior(bad, diffs, priors) ==
        -std::numeric_limits<double>::infinity());
  bad = s;
  bad.nu = -1.0;
  CHECK(hier_log_posterior(bad, diffs, priors) ==
        -std::numeric_limits<double>::infinity());
}

TEST_CASE("hier_log_posterior matches a term-by-term oracle recomputation") {
  const PairDifferences diffs = synthetic_diffs(31, 6, 10);
  const HierPriors priors = HierPriors::from_data(diffs, 0.2);
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const HierState s = state_inside(priors, diffs, rng);

    double expected = 0.0;
    for (std::size_t i = 0; i < diffs.per_dataset.size(); ++i) {
      expected += oracles::dense_cs_mvn_logpdf(diffs.per_dataset[i], s.mu_i[i],
                                               s.sigma_i[i] * s.sigma_i[i], priors.rho);
      expected += dist::student_logpdf(s.mu_i[i], s.mu_0, s.sigma_0, s.nu);
    }
    expected += -std::log(2.0);                       // mu_0 ~ U(-1,1)
    expected += -std::log(priors.sigma0_upper);       // sigma_0 prior
    expected += -static_cast<double>(diffs.per_dataset.size()) *
                std::log(priors.sigma_i_upper - priors.sigma_i_floor());
    expected += dist::gamma_logpdf(s.nu, s.alpha, s.beta);
    expected += -std::log(4.5) - std::log(0.10);      // alpha, beta priors

    CHECK(hier_log_posterior(s, diffs, priors) ==
          doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("hier_log_posterior pulls mu_i toward mu_0 when data is vacuous") {
  // Huge sigma_i makes the likelihood flat, small sigma_0 makes the t prior
  // sharp: moving mu_i toward mu_0 must increase the posterior.
  const PairDifferences diffs = synthetic_diffs(77, 3, 6);
  HierPriors priors = HierPriors::from_data(diffs, 0.3);
  Rng rng(3);
  HierState s = state_inside(priors, diffs, rng);
  for (auto& v : s.sigma_i) v = priors.sigma_i_upper * 0.9;
  s.mu_0 = 0.0;
  s.sigma_0 = 0.01;

  HierState closer = s;
  for (auto& v : closer.mu_i) v *= 0.5;  // halfway toward mu_0 = 0
  CHECK(hier_log_posterior(closer, diffs, priors) >
        hier_log_posterior(s, diffs, priors));
}

TEST_CASE("HierPriors::from_data builds the documented scales") {
  PairDifferences diffs;
  diffs.per_dataset = {{0.1, 0.2, 0.3}, {0.0, 0.0, 0.0}};  // sds: 0.1, 0
  const HierPriors priors = HierPriors::from_data(diffs, 0.25);
  CHECK(priors.rho == 0.25);
  CHECK(priors.sigma_i_upper == doctest::Approx(1000.0 * 0.05));
  // dataset means 0.2 and 0.0 -> sd = 0.1414..; upper = 1000 * that
  CHECK(priors.sigma0_upper ==
        doctest::Approx(1000.0 * std::sqrt(0.02)).epsilon(1e-9));

  PairDifferences zeros;
  zeros.per_dataset = {{0.0, 0.0}, {0.0, 0.0}};
  const HierPriors degenerate = HierPriors::from_data(zeros, 0.25);
  CHECK(degenerate.sigma_i_upper == doctest::Approx(1e-6));
  CHECK(degenerate.sigma0_upper == doctest::Approx(1e-6));
}

TEST_CASE("pair seeds are stable and order-sensitive") {
  const auto s1 = detail::pair_seed(42, "modelA", "modelB");
  CHECK(s1 == detail::pair_seed(42, "modelA", "modelB"));
  CHECK(s1 != detail::pair_seed(43, "modelA", "modelB"));
  CHECK(s1 != detail::pair_seed(42, "modelB", "modelA"));
  CHECK(detail::pair_seed(1, "ab", "c") != detail::pair_seed(1, "a", "bc"));
}
