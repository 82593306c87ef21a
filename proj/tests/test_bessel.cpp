#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "critheat/bessel.hpp"

using namespace critheat;

namespace {

// Error scale: |J_nu(x)| is bounded by ~ sqrt(2 / (pi x)) away from the origin,
// so compare against the envelope rather than the value near zeros.
double envelope(double nu, double x, double j) {
  return std::max(std::abs(j), std::min(1.0, std::sqrt(2.0 / (M_PI * std::max(x, nu + 1.0)))));
}

}  // namespace

TEST_CASE("J_nu against the standard library") {
  for (int twice = 0; twice <= 10; ++twice) {
    const double nu = twice / 2.0;
    double worst = 0.0;
    for (double x = 0.0; x <= 120.0; x += 0.173) {
      const double ref = std::cyl_bessel_j(nu, x);
      const double err = std::abs(bessel_j(nu, x) - ref) / envelope(nu, x, ref);
      worst = std::max(worst, err);
    }
    INFO("nu = " << nu);
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("half-integer closed forms") {
  for (double x : {0.1, 1.0, 7.5, 40.0}) {
    CHECK(bessel_j(0.5, x) == doctest::Approx(std::sqrt(2 / (M_PI * x)) * std::sin(x)).epsilon(1e-12));
    CHECK(bessel_j(1.5, x) ==
          doctest::Approx(std::sqrt(2 / (M_PI * x)) * (std::sin(x) / x - std::cos(x))).epsilon(1e-10));
  }
}

TEST_CASE("series and asymptotic agree in the overlap window") {
  for (int n : {0, 1})
    for (double x = 10.0; x <= 14.0; x += 0.25) {
      const double s = bessel_j_series(n, x);
      const double a = bessel_j_asymptotic(n, x);
      CHECK(std::abs(s - a) <= 1e-9 * envelope(n, x, s));
    }
}

TEST_CASE("scaled J at and near the origin") {
  for (int twice = 0; twice <= 9; ++twice) {
    const double nu = twice / 2.0;
    const double at0 = 1.0 / (std::pow(2.0, nu) * std::tgamma(nu + 1.0));
    CHECK(bessel_j_scaled(nu, 0.0) == doctest::Approx(at0).epsilon(1e-14));
    CHECK(bessel_j_scaled(nu, 1e-8) == doctest::Approx(at0).epsilon(1e-12));
    for (double x : {0.3, 3.0, 30.0})
      CHECK(bessel_j_scaled(nu, x) == doctest::Approx(std::cyl_bessel_j(nu, x) / std::pow(x, nu)).epsilon(1e-9));
  }
}
