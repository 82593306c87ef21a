#pragma once

namespace critheat {

// Bessel functions of the first kind for the orders a radial Fourier transform
// in R^d needs: nu = (d-2)/2, an integer (d even) or half-integer (d odd).

/// Power series, any nu >= 0. Accurate for moderate x (used below 12).
double bessel_j_series(double nu, double x);

/// Hankel asymptotic expansion for J_0 or J_1, truncated at the smallest term.
double bessel_j_asymptotic(int n, double x);

/// J_nu(x) for x >= 0, nu integer or half-integer.
double bessel_j(double nu, double x);

/// J_nu(x) / x^nu, finite at x = 0 where it equals 1 / (2^nu Gamma(nu + 1)).
double bessel_j_scaled(double nu, double x);

}  // namespace critheat
