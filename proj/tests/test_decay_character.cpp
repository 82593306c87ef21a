#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <filesystem>
#include <initializer_list>
#include <vector>

#include "critheat/decay_character.hpp"
#include "critheat/errors.hpp"
#include "critheat/functionals.hpp"
#include "critheat/ground_state.hpp"

using namespace critheat;

namespace {

// omega int_0^rho s^{2k+d-1} exp(-2 b s^2) ds = (omega / 2) (2b)^{-a} gamma(a, 2 b rho^2), a = k + d/2
double gauss_power_mass(int d, double k, double b, double rho) {
  const double a = k + d / 2.0;
  return 0.5 * sphere_area(d) * std::pow(2 * b, -a) * boost::math::tgamma_lower(a, 2 * b * rho * rho);
}

SpectrumFn tabulate(int d, double (*f)(double)) {
  std::vector<double> s, v;
  for (double x = 1e-5; x < 20.0; x *= 1.02) {
    s.push_back(x);
    v.push_back(f(x));
  }
  return SpectrumFn::tabulated(d, s, v, "test");
}

}  // namespace

TEST_CASE("low_freq_mass of monomials and Gaussians") {
  const auto one = tabulate(3, [](double) { return 1.0; });
  for (double rho : {1e-3, 1e-2, 0.5})
    CHECK(low_freq_mass(one, rho) == doctest::Approx(4 * M_PI / 3 * std::pow(rho, 3)).epsilon(1e-8));
  const auto lin = SpectrumFn::gauss_power(3, 1.0, 1.0, 0.0);
  for (double rho : {1e-3, 1e-2, 0.5})
    CHECK(low_freq_mass(lin, rho) == doctest::Approx(4 * M_PI * std::pow(rho, 5) / 5).epsilon(1e-8));
  const auto g = SpectrumFn::gauss_power(3, 1.0, 0.0, 1.0);
  for (double rho : {1e-3, 1e-2})
    CHECK(low_freq_mass(g, rho) == doctest::Approx(4 * M_PI / 3 * std::pow(rho, 3)).epsilon(1e-4));
  for (int d : {3, 4, 7, 11})
    for (double k : {-1.0, 0.0, 2.0})
      for (double rho : {1e-3, 0.1, 2.0}) {
        const auto sp = SpectrumFn::gauss_power(d, 1.0, k, 0.7);
        CHECK(low_freq_mass(sp, rho) == doctest::Approx(gauss_power_mass(d, k, 0.7, rho)).epsilon(1e-8));
      }
  CHECK_THROWS_AS(low_freq_mass(g, 0.0), DomainError);
  CHECK_THROWS_AS(low_freq_mass(one, 50.0), DomainError);
  // not square integrable at the origin
  CHECK(std::isinf(low_freq_mass(SpectrumFn::gauss_power(3, 1.0, -2.0, 1.0), 0.1)));
}

TEST_CASE("decay indicator of monomials") {
  for (int d : {3, 5}) {
    for (double k : {0.0, 1.0}) {
      const auto sp = SpectrumFn::gauss_power(d, 1.0, k, 0.0);
      const std::vector<double> rhos{1e-1, 1e-2, 1e-3};
      for (double x : decay_indicator(sp, k, rhos))
        CHECK(x == doctest::Approx(sphere_area(d) / (2 * k + d)).epsilon(1e-8));
      const auto up = decay_indicator(sp, k + 0.5, rhos);
      CHECK(up[2] > 10 * up[0]);
      const auto down = decay_indicator(sp, k - 0.5, rhos);
      CHECK(down[2] < 0.1 * down[0]);
    }
  }
}

TEST_CASE("decay character of s^k exp(-s^2)") {
  for (int d : {3, 4, 5, 10, 11})
    for (double k : {-1.0, 0.0, 1.0, 2.0}) {
      const auto sp = SpectrumFn::gauss_power(d, 1.0, k, 1.0);
      const auto est = decay_character(sp);
      INFO("d = " << d << ", k = " << k);
      CHECK(std::abs(est.r_star - k) <= 0.02);
      CHECK(est.exists);
      CHECK_FALSE(est.boundary);
      const auto shifted = decay_character(lambda_spectrum(sp));
      CHECK(std::abs(shifted.r_star - est.r_star - 1.0) <= 0.03);
    }
}

TEST_CASE("decay character of the bubble") {
  for (int d : {5, 6, 8}) {
    const auto est = decay_character(SpectrumFn::bubble(d, 1.0, 1.0));
    CHECK(std::abs(est.r_star + 2.0) <= 0.02);
    CHECK(std::abs(decay_character(lambda_spectrum(SpectrumFn::bubble(d, 1.0, 1.0))).r_star + 1.0) <= 0.03);
  }
  for (int d : {3, 4}) {
    const auto est = decay_character(SpectrumFn::bubble(d, 1.0, 1.0));
    CHECK(est.boundary);
    CHECK(est.r_star == -d / 2.0);
  }
}

TEST_CASE("bubble spectrum reproduces the gradient norm and the L2 norm") {
  for (int d : {3, 4, 5, 6}) {
    const auto grad = lambda_spectrum(SpectrumFn::bubble(d, 1.0, 1.0));
    CHECK(linear_heat_l2_sq(grad, 0.0) == doctest::Approx(bubble_gradient_norm_sq_exact(d)).epsilon(1e-7));
  }
  // ||W||^2 in d = 6: omega A^2 int r^5 (1+r^2)^{-4} dr = omega A^2 B(3, 1) / 2
  const double a6 = bubble_amplitude(6);
  CHECK(linear_heat_l2_sq(SpectrumFn::bubble(6, 1.0, 1.0), 0.0) ==
        doctest::Approx(sphere_area(6) * a6 * a6 / 6.0).epsilon(1e-7));
  // amplitude and scale: a lambda^{-(d-2)/2} W(r / lambda) has L2 norm^2 a^2 lambda^2 ||W||^2
  CHECK(linear_heat_l2_sq(SpectrumFn::bubble(6, 0.5, 2.0), 0.0) ==
        doctest::Approx(0.25 * 4.0 * sphere_area(6) * a6 * a6 / 6.0).epsilon(1e-7));
}

TEST_CASE("linear heat decay") {
  const auto g = SpectrumFn::gauss_power(3, 1.0, 0.0, 0.5);
  for (double t : {0.0, 0.5, 3.0, 100.0})
    CHECK(linear_heat_l2_sq(g, t) == doctest::Approx(std::pow(M_PI, 1.5) * std::pow(1 + 2 * t, -1.5)).epsilon(1e-8));
  double prev = linear_heat_l2_sq(g, 0.0);
  for (double t = 0.25; t < 50; t *= 1.7) {
    const double v = linear_heat_l2_sq(g, t);
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("two-sided decay bounds") {
  std::vector<double> ts;
  for (double t = 1.0; t <= 100.0 * (1 + 1e-12); t *= std::pow(10.0, 0.125)) ts.push_back(t);
  {
    // exp(-s^2): ||v(t)||^2 = c (1+t)^{-d/2} exactly, so the compensated ratio is flat
    const auto [lo, hi] = decay_bounds_check(SpectrumFn::gauss_power(3, 1.0, 0.0, 1.0), 0.0, ts);
    CHECK(lo > 0.0);
    CHECK(hi / lo <= 3.0);
    CHECK(hi / lo == doctest::Approx(1.0).epsilon(1e-7));
  }
  {
    const auto [lo, hi] = decay_bounds_check(SpectrumFn::gauss_power(4, 1.0, 1.0, 1.0), 1.0, ts);
    CHECK(lo > 0.0);
    CHECK(hi / lo <= 3.0);
  }
  {
    // a half unit too much: the ratio drifts by exactly ((1 + 100) / (1 + 1))^{1/2}
    const auto [lo, hi] = decay_bounds_check(SpectrumFn::gauss_power(3, 1.0, 0.0, 1.0), 0.5, ts);
    CHECK(lo / hi == doctest::Approx(std::sqrt(2.0 / 101.0)).epsilon(1e-6));
  }
}

TEST_CASE("hankel spectrum of a Gaussian") {
  for (int d : {3, 4, 5}) {
    const auto grid = make_grid(d, 40.0, 4001, 1.0);
    const auto u = RadialField::sample(grid, [](double r) { return std::exp(-r * r / 2); });
    const auto nodes = spectrum_nodes(1e-4, 12.0, 200);
    const auto sp = hankel_spectrum(u, nodes);
    for (std::size_t j = 0; j < nodes.size(); j += 7) {
      const double s = nodes[j];
      CHECK(std::abs(sp(s) - std::exp(-s * s / 2)) <= 1e-4);
    }
    CHECK(linear_heat_l2_sq(sp, 0.0) == doctest::Approx(lp_norm_pow(u, 2.0)).epsilon(1e-3));
    CHECK(std::abs(decay_character(sp).r_star) <= 0.02);
  }
}

TEST_CASE("hankel spectrum edge cases") {
  const auto grid = make_grid(5, 30.0, 2000, 1.0);
  const auto nodes = spectrum_nodes(1e-4, 10.0, 64);
  const auto zero = hankel_spectrum(RadialField::zeros(grid), nodes);
  for (double v : zero.values()) CHECK(v == 0.0);

  const auto bump = RadialField::sample(grid, [](double r) {
    const double x = (r - 3.0) / 2.0;
    return std::abs(x) < 1 ? std::pow(1 - x * x, 4) : 0.0;
  });
  const auto sp = hankel_spectrum(bump, spectrum_nodes(1e-4, 40.0, 400));
  CHECK(linear_heat_l2_sq(sp, 0.0) == doctest::Approx(lp_norm_pow(bump, 2.0)).epsilon(1e-3));

  const auto w = aubin_talenti({5, 1.0}, grid);
  CHECK_THROWS_AS(hankel_spectrum(w, nodes), TailMassError);
}

TEST_CASE("heat semigroup field") {
  const auto grid = make_grid(3, 30.0, 600, 1.0);
  const auto sp = SpectrumFn::gauss_power(3, 1.0, 0.0, 0.5);
  const auto u = heat_semigroup_field(sp, 0.5, grid);
  for (std::size_t i = 0; i < grid->size(); i += 37) {
    const double r = grid->node(i);
    CHECK(std::abs(u[i] - std::pow(0.5, 1.5) * std::exp(-r * r / 4)) <= 1e-8);
  }
}

TEST_CASE("tabulated spectra") {
  const std::vector<double> s{1e-4, 1e-2, 1.0, 2.0, 4.0};
  const std::vector<double> v{1.0, 1.0, 0.5, 0.25, 0.0};
  const auto sp = SpectrumFn::tabulated(4, s, v, "hand made");
  CHECK(sp.s_max() == 4.0);
  CHECK(sp(1e-6) == 1.0);
  CHECK(sp(5.0) == 0.0);
  CHECK(sp(2.0) == doctest::Approx(0.25));
  const auto lam = lambda_spectrum(sp);
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(lam(s[i]) == doctest::Approx(s[i] * v[i]));
  CHECK_THROWS_AS(SpectrumFn::tabulated(4, {1e-4, 1e-2, 1.0}, {1, 1, 1}, ""), InvalidArgument);
  CHECK_THROWS_AS(SpectrumFn::tabulated(4, {1e-2, 2e-2, 1.0, 2.0}, {1, 1, 1, 1}, ""), InvalidArgument);
  CHECK_THROWS_AS(SpectrumFn::tabulated(4, {1e-4, 1e-2, 1e-2, 2.0}, {1, 1, 1, 1}, ""), InvalidArgument);
  CHECK(SpectrumFn::gauss_power(3, 1, 0, 1).s_max() == INFINITY);
}

TEST_CASE("spectrum file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "critheat_test_spectrum.txt";
  const auto nodes = spectrum_nodes(1e-4, 10.0, 50);
  const auto sp = SpectrumFn::gauss_power(5, 2.0, 1.0, 0.5);
  write_spectrum(path, sp, nodes);
  const auto back = read_spectrum(path);
  CHECK(back.dim() == 5);
  CHECK(back.kind() == SpectrumKind::Tabulated);
  REQUIRE(back.nodes().size() == nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    CHECK(back.nodes()[i] == nodes[i]);
    CHECK(back.values()[i] == sp(nodes[i]));
  }
  std::filesystem::remove(path);
}
