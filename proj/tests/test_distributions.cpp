#include <doctest.h>

#include <cmath>

#include "modelcmp/distributions.hpp"
#include "modelcmp/rng.hpp"
#include "oracles.hpp"

using namespace modelcmp;

TEST_CASE("normal cdf/quantile are mutual inverses") {
  for (double p : {1e-8, 1e-4, 0.025, 0.3, 0.5, 0.7, 0.975, 1.0 - 1e-6}) {
    const double z = dist::normal_quantile(p);
    CHECK(dist::normal_cdf(z) == doctest::Approx(p).epsilon(1e-10));
  }
  CHECK(dist::normal_quantile(0.975) == doctest::Approx(1.959963985).epsilon(1e-8));
  CHECK_THROWS(dist::normal_quantile(0.0));
  CHECK_THROWS(dist::normal_quantile(1.0));
}

TEST_CASE("regularized incomplete gamma against quadrature") {
  const struct {
    double x;
    std::size_t dof;
  } cases[] = {{0.5, 1}, {3.841459, 1}, {5.991465, 2}, {12.0, 5}, {30.0, 20}, {4.0, 10}};
  for (const auto& c : cases) {
    const double via_gamma = dist::reg_gamma_q(c.dof / 2.0, c.x / 2.0);
    const double via_quadrature = oracles::chi_square_tail_by_quadrature(c.x, c.dof);
    CHECK(via_gamma == doctest::Approx(via_quadrature).epsilon(1e-10));
  }
  CHECK(dist::reg_gamma_q(1.0, 0.0) == 1.0);
  CHECK(dist::reg_gamma_p(1.0, 0.0) == 0.0);
}

TEST_CASE("student_cdf matches quadrature and symmetry") {
  for (double t : {-3.0, -0.5, 0.0, 0.5, 1.7, 4.2}) {
    for (double dof : {4.0, 9.0, 25.5}) {
      CHECK(dist::student_cdf(t, dof) ==
            doctest::Approx(oracles::student_cdf_by_quadrature(t, dof)).epsilon(1e-10));
      CHECK(dist::student_cdf(t, dof) ==
            doctest::Approx(1.0 - dist::student_cdf(-t, dof)).epsilon(1e-12));
    }
  }
  // Large dof approaches the normal.
  CHECK(dist::student_cdf(1.959964, 1e7) == doctest::Approx(0.975).epsilon(1e-5));
}

TEST_CASE("student_logpdf integrates to its own CDF") {
  // Density consistency at a couple of points via the quadrature oracle.
  const double scale = 0.4, loc = 0.2, dof = 6.0;
  const double mass = oracles::integrate(
      [&](double x) { return std::exp(dist::student_logpdf(x, loc, scale, dof)); },
      loc - 40.0 * scale, loc + 40.0 * scale, 1e-11);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("gamma_logpdf normalizes and places its mode") {
  const double shape = 2.75, rate = 0.1;
  const double mass = oracles::integrate(
      [&](double x) { return std::exp(dist::gamma_logpdf(x, shape, rate)); }, 1e-9,
      800.0, 1e-11);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  // Mode at (shape-1)/rate for shape > 1.
  const double mode = (shape - 1.0) / rate;
  CHECK(dist::gamma_logpdf(mode, shape, rate) >
        dist::gamma_logpdf(mode * 1.1, shape, rate));
  CHECK(dist::gamma_logpdf(mode, shape, rate) >
        dist::gamma_logpdf(mode * 0.9, shape, rate));
}

TEST_CASE("rng moments are sane") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum2 += z * z;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.01));
  CHECK(sum2 / n == doctest::Approx(1.0).epsilon(0.02));

  double gsum = 0.0;
  const double shape = 3.7;
  for (int i = 0; i < n; ++i) gsum += rng.gamma(shape);
  CHECK(gsum / n == doctest::Approx(shape).epsilon(0.02));

  // Student t second moment: dof/(dof-2).
  const double dof = 8.0;
  double tsum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double t = rng.student_t(dof);
    tsum2 += t * t;
  }
  CHECK(tsum2 / n == doctest::Approx(dof / (dof - 2.0)).epsilon(0.08));
}

TEST_CASE("rng streams are deterministic and fork-independent") {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng master(1);
  Rng f0 = master.fork(0), f1 = master.fork(1), f0_again = master.fork(0);
  CHECK(f0.next_u64() == f0_again.next_u64());
  Rng g0 = master.fork(0);
  g0.next_u64();
  CHECK(g0.next_u64() != f1.next_u64());
}
