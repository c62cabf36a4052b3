#pragma once

namespace hebo::sf {

// Standard normal density and CDF.
double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of normal_cdf, defined on (0, 1). Accurate to ~1e-15 in the
/// central range and usable out to p ~ 1e-300 (Wichura's AS 241 algorithm).
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(s, x), s > 0, x >= 0.
double reg_incomplete_gamma(double s, double x);

/// Regularized incomplete beta I_x(a, b), a,b > 0, x in [0, 1].
double reg_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double dof);
double f_cdf(double x, double d1, double d2);
double chisq_cdf(double x, double k);

}  // namespace hebo::sf
