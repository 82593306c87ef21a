#include "critheat/bessel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "critheat/errors.hpp"
#include "critheat/radial_field.hpp"

namespace critheat {

namespace {

constexpr double kSeriesLimit = 12.0;

int twice_order(double nu) {
  const double two = 2.0 * nu;
  const int k = static_cast<int>(std::lround(two));
  if (nu < 0.0 || std::abs(two - k) > 1e-12)
    throw InvalidArgument("bessel: order must be a nonnegative integer or half-integer, got " +
                          std::to_string(nu));
  return k;
}

// sum_k (-1)^k (x/2)^{2k} / (k! Gamma(k + nu + 1)), i.e. J_nu(x) (x/2)^{-nu}.
double reduced_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0 / gamma_half(twice_order(nu) + 2);
  double sum = term;
  for (int k = 1; k < 500; ++k) {
    term *= -q / (k * (k + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > q) break;
  }
  return sum;
}

// Upward recurrence J_{k+1} = (2k/x) J_k - J_{k-1}; stable while x > k.
double recur_up(double nu0, double j0, double j1, double nu, double x) {
  double a = j0, b = j1, k = nu0 + 1.0;
  if (nu == nu0) return a;
  while (k < nu - 1e-12) {
    const double c = (2.0 * k / x) * b - a;
    a = b;
    b = c;
    k += 1.0;
  }
  return b;
}

bool use_series(double nu, double x) { return x <= kSeriesLimit || x < nu + 1.0; }

double large_argument(double nu, double x) {
  if (twice_order(nu) % 2 == 0) {
    return recur_up(0.0, bessel_j_asymptotic(0, x), bessel_j_asymptotic(1, x), nu, x);
  }
  // Half-integer orders are elementary: J_{1/2}, J_{3/2} in closed form.
  const double pre = std::sqrt(2.0 / (std::numbers::pi * x));
  const double j_half = pre * std::sin(x);
  const double j_three_half = pre * (std::sin(x) / x - std::cos(x));
  return recur_up(0.5, j_half, j_three_half, nu, x);
}

}  // namespace

double bessel_j_series(double nu, double x) {
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  return std::pow(0.5 * x, nu) * reduced_series(nu, x);
}

double bessel_j_asymptotic(int n, double x) {
  if (n != 0 && n != 1) throw InvalidArgument("bessel_j_asymptotic: order must be 0 or 1");
  const double mu = 4.0 * n * n;
  // a_k = prod_{j<=k} (mu - (2j-1)^2) / (k! 8^k x^k)
  double p = 1.0, q = 0.0, term = 1.0, last = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * x);
    if (std::abs(term) > last) break;  // the series is asymptotic: stop at the smallest term
    last = std::abs(term);
    switch (k % 4) {
      case 1: q += term; break;
      case 2: p -= term; break;
      case 3: q -= term; break;
      case 0: p += term; break;
    }
    if (last < 1e-17) break;
  }
  const double chi = x - (0.5 * n + 0.25) * std::numbers::pi;
  return std::sqrt(2.0 / (std::numbers::pi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

double bessel_j(double nu, double x) {
  twice_order(nu);
  if (x < 0.0) throw InvalidArgument("bessel_j: x must be nonnegative");
  if (use_series(nu, x)) return bessel_j_series(nu, x);
  return large_argument(nu, x);
}

double bessel_j_scaled(double nu, double x) {
  twice_order(nu);
  if (x < 0.0) throw InvalidArgument("bessel_j_scaled: x must be nonnegative");
  if (use_series(nu, x)) return std::pow(0.5, nu) * reduced_series(nu, x);
  return large_argument(nu, x) / std::pow(x, nu);
}

}  // namespace critheat
