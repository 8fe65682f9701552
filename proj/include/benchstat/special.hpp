#pragma once

// Special functions and distribution tails used by the rank tests.

#include <functional>

namespace benchstat
{

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution with `dof` degrees of freedom.
double chi_square_sf(double x, int dof);
double chi_square_cdf(double x, int dof);

double normal_pdf(double z);
double normal_cdf(double z);

/// Adaptive Gauss-Kronrod (G7/K15) integration with bisection until the
/// local error estimate falls below its share of `abs_tol`.
double integrate_gk15(const std::function<double(double)>& f, double lo, double hi,
                      double abs_tol);

/// CDF of the range of k independent standard normals (the studentized
/// range with infinite denominator degrees of freedom).
double studentized_range_cdf(double q, int k);
/// Upper tail of the same distribution.
double studentized_range_sf(double q, int k);

}  // namespace benchstat
