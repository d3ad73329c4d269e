#pragma once

namespace styledrift {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation, relative tolerance 1e-12.
double incomplete_beta(double a, double b, double x);

// Student's t CDF P(T <= t) with nu degrees of freedom.
double student_t_cdf(double t, double nu);

// Two-sided p-value for an observed t statistic.
double student_t_two_sided_p(double t, double nu);

// F distribution CDF P(F <= f) with (d1, d2) degrees of freedom.
double f_cdf(double f, double d1, double d2);

// Standard normal CDF.
double normal_cdf(double z);

}  // namespace styledrift
