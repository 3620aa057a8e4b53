#ifndef MODELCMP_DISTRIBUTIONS_HPP
#define MODELCMP_DISTRIBUTIONS_HPP

namespace modelcmp::dist {

/// Standard normal density.
double normal_pdf(double z);

/// Standard normal CDF via erfc; accurate in both tails.
double normal_cdf(double z);

/// Inverse standard normal CDF (Acklam's rational approximation polished
/// with two Halley steps; |error| well under 1e-12 for p in (0,1)).
double normal_quantile(double p);

/// Unpolished Acklam approximation (relative error ~1e-9): enough for rank
/// z-scores, and several times cheaper in tight loops.
double normal_quantile_fast(double p);

/// Regularized lower incomplete gamma P(a, x), series/continued-fraction
/// split at x = a + 1.
double reg_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double reg_gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b) by Lentz continued fraction.
double reg_beta(double a, double b, double x);

/// CDF of Student's t with `dof` degrees of freedom (dof > 0, possibly
/// non-integer).
double student_cdf(double t, double dof);

/// Log density of the location-scale Student t.
double student_logpdf(double x, double location, double scale, double dof);

/// Log density of Gamma(shape, rate).
double gamma_logpdf(double x, double shape, double rate);

}  // namespace modelcmp::dist

#endif
