#include <doctest.h>

#include <cmath>
#include <numbers>

#include "critheat/errors.hpp"
#include "critheat/radial_field.hpp"

using namespace critheat;
using std::numbers::pi;

TEST_CASE("uniform grid has integer nodes") {
  const auto g = make_grid(3, 15.0, 16, 1.0);
  REQUIRE(g->size() == 16);
  for (std::size_t i = 0; i < 16; ++i) CHECK(g->node(i) == doctest::Approx(double(i)).epsilon(1e-14));
  CHECK(g->node(0) == 0.0);
  CHECK(g->node(15) == 15.0);
  CHECK(g->uniform());
}

TEST_CASE("graded grid ends exactly at R with constant spacing ratio") {
  const auto g = make_grid(5, 100.0, 2049, 1.003);
  CHECK(g->node(g->size() - 1) == 100.0);
  CHECK(g->node(0) == 0.0);
  for (std::size_t i : {0u, 100u, 1000u, 2046u})
    CHECK(g->spacing(i + 1) / g->spacing(i) == doctest::Approx(1.003).epsilon(1e-9));
  // h0 (s^(n-1) - 1) / (s - 1) = R
  const double h0 = 100.0 * 0.003 / (std::pow(1.003, 2048) - 1.0);
  CHECK(g->spacing(0) == doctest::Approx(h0).epsilon(1e-9));
}

TEST_CASE("grid preconditions") {
  CHECK_THROWS_AS(make_grid(2, 10.0, 11, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(3, 10.0, 11, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(3, 0.0, 32, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(3, 10.0, 15, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_grid(3, 10.0, 32, 1.3), InvalidArgument);
  CHECK_THROWS_AS(make_grid(3, 10.0, 32, 0.99), InvalidArgument);
  CHECK_NOTHROW(make_grid(3, 10.0, 16, 1.2));
}

TEST_CASE("sphere_area") {
  CHECK(sphere_area(3) == doctest::Approx(4 * pi).epsilon(1e-13));
  CHECK(sphere_area(4) == doctest::Approx(2 * pi * pi).epsilon(1e-13));
  CHECK(sphere_area(5) == doctest::Approx(8 * pi * pi / 3).epsilon(1e-13));
  for (int d = 3; d <= 10; ++d)
    CHECK(sphere_area(d) == doctest::Approx(2 * std::pow(pi, d / 2.0) / std::tgamma(d / 2.0)).epsilon(1e-12));
  for (int k = 1; k <= 30; ++k) CHECK(gamma_half(k) == doctest::Approx(std::tgamma(k / 2.0)).epsilon(1e-12));
}

TEST_CASE("radial_integral of closed forms") {
  const auto g = make_grid(3, 12.0, 4001, 1.0);
  CHECK(radial_integral(RadialField::zeros(g)) == 0.0);
  const auto gauss = RadialField::sample(g, [](double r) { return std::exp(-r * r); });
  CHECK(radial_integral(gauss) == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-5));

  const auto g4 = make_grid(4, 2.0, 101, 1.0);
  const auto one = RadialField::sample(g4, [](double) { return 1.0; });
  CHECK(radial_integral(one) == doctest::Approx(8 * pi * pi).epsilon(1e-12));
  // moments: int_0^2 r^{3+m} dr * 2 pi^2
  CHECK(radial_integral(one, 1) == doctest::Approx(2 * pi * pi * 32.0 / 5.0).epsilon(1e-12));
  CHECK(radial_integral(one, 2) == doctest::Approx(2 * pi * pi * 64.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("radial_integral converges at second order") {
  // (1 - r^2)^3 on [0, 1] in d = 3: 4 pi (1/3 - 3/5 + 3/7 - 1/9)
  const double exact = 4 * pi * (1.0 / 3 - 3.0 / 5 + 3.0 / 7 - 1.0 / 9);
  double prev = 0.0;
  for (std::size_t n : {33u, 65u, 129u, 257u}) {
    const auto g = make_grid(3, 1.0, n, 1.0);
    const auto f = RadialField::sample(g, [](double r) { return std::pow(1 - r * r, 3); });
    const double err = std::abs(radial_integral(f) - exact);
    if (prev > 0.0) {
      const double rate = std::log2(prev / err);
      CHECK(rate >= 1.8);
      CHECK(rate <= 2.2);
    }
    prev = err;
  }
}

TEST_CASE("radial_integral rejects non-finite values") {
  auto f = RadialField::zeros(make_grid(3, 1.0, 32, 1.0));
  f[3] = std::nan("");
  CHECK_FALSE(f.finite());
  CHECK_THROWS_AS(radial_integral(f), CorruptionError);
  f[3] = INFINITY;
  CHECK_THROWS_AS(f.require_finite("test"), CorruptionError);
}

TEST_CASE("ddr") {
  const auto g = make_grid(3, 4.0, 41, 1.0);
  const auto sq = ddr(RadialField::sample(g, [](double r) { return r * r; }));
  CHECK(sq[0] == 0.0);
  for (std::size_t i = 1; i + 1 < g->size(); ++i) CHECK(sq[i] == doctest::Approx(2 * g->node(i)).epsilon(1e-12));
  const auto c = ddr(RadialField::sample(g, [](double) { return 3.5; }));
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(c[i] == 0.0);

  // sin r: halving h divides the max error by about 4
  auto max_err = [](std::size_t n) {
    const auto gg = make_grid(3, 3.0, n, 1.0);
    const auto d = ddr(RadialField::sample(gg, [](double r) { return std::sin(r); }));
    double e = 0.0;
    for (std::size_t i = 1; i < gg->size(); ++i) e = std::max(e, std::abs(d[i] - std::cos(gg->node(i))));
    return e;
  };
  const double ratio = max_err(101) / max_err(201);
  CHECK(ratio > 3.5);
  CHECK(ratio < 4.5);
}

TEST_CASE("radial_laplacian") {
  const auto g = make_grid(3, 4.0, 41, 1.0);
  const auto lap = radial_laplacian(RadialField::sample(g, [](double r) { return r * r; }));
  for (std::size_t i = 0; i + 1 < g->size(); ++i) CHECK(lap[i] == doctest::Approx(6.0).epsilon(1e-11));
  const auto c = radial_laplacian(RadialField::sample(g, [](double) { return -2.0; }));
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(c[i] == 0.0);

  for (int d : {4, 7}) {
    const auto gd = make_grid(d, 2.0, 33, 1.0);
    const auto l = radial_laplacian(RadialField::sample(gd, [](double r) { return r * r; }));
    for (std::size_t i = 0; i + 1 < gd->size(); ++i) CHECK(l[i] == doctest::Approx(2.0 * d).epsilon(1e-11));
  }
}

TEST_CASE("dirichlet form and lumped sums") {
  const auto g = make_grid(3, 30.0, 3001, 1.0);
  const auto gauss = RadialField::sample(g, [](double r) { return std::exp(-r * r / 2); });
  // int |grad e^{-r^2/2}|^2 dx = int r^2 e^{-r^2} dx = (3/2) pi^{3/2}
  CHECK(dirichlet_form(gauss, gauss) == doctest::Approx(1.5 * std::pow(pi, 1.5)).epsilon(1e-4));
  // int e^{-r^2} dx = pi^{3/2}
  CHECK(lumped_power_sum(gauss, 2.0) == doctest::Approx(std::pow(pi, 1.5)).epsilon(1e-4));
  CHECK(lumped_power_sum(RadialField::zeros(g), 3.0) == 0.0);
}

TEST_CASE("field arithmetic and interpolation") {
  const auto g = make_grid(3, 5.0, 51, 1.0);
  const auto a = RadialField::sample(g, [](double r) { return r; });
  const auto b = 2.0 * a - a + a;
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(b[i] == doctest::Approx(2.0 * a[i]));
  CHECK(b.max_abs() == doctest::Approx(10.0));
  CHECK((-1.0 * b).min_value() == doctest::Approx(-10.0));

  const FieldInterpolant f(a);
  CHECK(f(g->node(7)) == doctest::Approx(a[7]));
  CHECK(f(2.25) == doctest::Approx(2.25).epsilon(1e-10));
  CHECK(f.derivative(2.25) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(f(6.0) == 0.0);
  CHECK_THROWS(RadialField(g, std::vector<double>(3, 0.0)));
}
