#pragma once

namespace cogscope::detail {

// Standard normal CDF.
double normal_cdf(double x);

// Inverse standard normal CDF (Wichura's PPND16; ~1e-15 accuracy).
double normal_quantile(double p);

// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

// Two-sided p-value for a Student-t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

} // namespace cogscope::detail
