#include <doctest.h>

#include <cmath>

#include "critheat/errors.hpp"
#include "critheat/functionals.hpp"
#include "critheat/ground_state.hpp"

using namespace critheat;

namespace {

struct Bubble {
  GridPtr grid;
  RadialField w;
  double h1;
  double ew;
};

Bubble bubble(int d) {
  auto g = default_ground_state_grid(d);
  auto w = aubin_talenti({d, 1.0}, g);
  const double h1 = h1_norm_sq(w);
  return {g, w, h1, energy(w)};
}

}  // namespace

TEST_CASE("energy and nehari on the aW family") {
  for (int d : {3, 4, 5, 6}) {
    const auto b = bubble(d);
    const double p = critical_exponent(d);
    CHECK(energy(RadialField::zeros(b.grid)) == 0.0);
    CHECK(b.ew == doctest::Approx(b.h1 / d).epsilon(1e-4));
    CHECK(std::abs(nehari(b.w)) / b.h1 < 1e-4);
    CHECK(nehari(0.5 * b.w) == doctest::Approx(b.h1 * (0.25 - std::pow(0.5, p))).epsilon(1e-3));
    CHECK(nehari(0.5 * b.w) > 0.0);
    CHECK(nehari(1.5 * b.w) < 0.0);
  }
  const auto b = bubble(5);
  const double e12 = energy(1.2 * b.w);
  CHECK(e12 == doctest::Approx(b.h1 * (0.72 - 0.3 * std::pow(1.2, 10.0 / 3.0))).epsilon(1e-4));
  CHECK(e12 / b.h1 == doctest::Approx(0.169).epsilon(5e-3));
  CHECK(e12 < b.ew);
}

TEST_CASE("energy report identities hold exactly") {
  const auto b = bubble(4);
  for (double a : {0.3, 1.0, 1.7}) {
    const auto rep = energy_report(a * b.w, 2.5);
    CHECK(rep.t == 2.5);
    CHECK(rep.energy == 0.5 * rep.h1_sq - rep.l2star_pow / critical_exponent(4));
    CHECK(rep.nehari == rep.h1_sq - rep.l2star_pow);
  }
}

TEST_CASE("L2 norm is absent for W in low dimensions, present for a Gaussian") {
  const auto g3 = make_grid(3, 200.0, 2000, 1.003);
  CHECK_FALSE(energy_report(aubin_talenti({3, 1.0}, g3)).l2_sq.has_value());
  const auto g4 = make_grid(4, 200.0, 2000, 1.003);
  CHECK_FALSE(energy_report(aubin_talenti({4, 1.0}, g4)).l2_sq.has_value());
  const auto g6 = make_grid(6, 100.0, 2000, 1.003);
  CHECK(energy_report(aubin_talenti({6, 1.0}, g6)).l2_sq.has_value());

  const auto g = make_grid(3, 30.0, 3001, 1.0);
  const auto gauss = RadialField::sample(g, [](double r) { return std::exp(-r * r / 2); });
  const auto rep = energy_report(gauss);
  REQUIRE(rep.l2_sq.has_value());
  CHECK(*rep.l2_sq == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-4));
}

TEST_CASE("non-finite fields are reported as corruption") {
  auto u = RadialField::zeros(make_grid(4, 10.0, 64, 1.0));
  u[5] = std::nan("");
  CHECK_THROWS_AS(energy(u), CorruptionError);
  CHECK_THROWS_AS(nehari(u), CorruptionError);
  CHECK_THROWS_AS(energy_report(u), CorruptionError);
  u[5] = 1e300;
  CHECK_THROWS_AS(energy(u), CorruptionError);
}

TEST_CASE("classify_set") {
  const auto b = bubble(5);
  CHECK(classify_set(0.9 * b.w, b.ew).verdict == SetVerdict::MPlus);
  CHECK(classify_set(1.2 * b.w, b.ew).verdict == SetVerdict::MMinus);
  CHECK(classify_set(b.w, b.ew).verdict == SetVerdict::AtThreshold);
  const auto m = classify_set(0.9 * b.w, b.ew);
  CHECK(m.margin == doctest::Approx(std::min(b.ew - m.energy, std::abs(m.nehari))));
  // a bubble with a bump on top has energy above E(W)
  auto above = b.w;
  for (std::size_t i = 0; i < 50; ++i) above[i] += 3.0;
  CHECK(classify_set(above, b.ew).verdict == SetVerdict::AboveThreshold);
  CHECK(to_string(SetVerdict::MMinus) == "M-");
}

TEST_CASE("sign of J matches the gradient comparison below threshold") {
  for (int d : {3, 5, 6}) {
    const auto b = bubble(d);
    for (double a : {0.2, 0.5, 0.8, 0.95, 1.05, 1.2, 1.4}) {
      const auto u = a * b.w;
      if (!(energy(u) < b.ew)) continue;
      CHECK((nehari(u) >= 0.0) == (h1_norm_sq(u) < b.h1));
    }
  }
}

TEST_CASE("norm_equivalence_gap") {
  const auto b = bubble(3);
  const auto [lo, hi] = norm_equivalence_gap(0.9 * b.w, b.ew);
  CHECK(lo >= 0.0);
  CHECK(hi >= 0.0);
  const auto zero = norm_equivalence_gap(RadialField::zeros(b.grid), b.ew);
  CHECK(zero.first == 0.0);
  CHECK(zero.second == 0.0);
  const auto half = 0.5 * b.w;
  const auto gap = norm_equivalence_gap(half, b.ew);
  CHECK(gap.second == doctest::Approx(lp_norm_pow(half, 6.0) / 6.0).epsilon(1e-12));
  CHECK(gap.second > 0.0);
  CHECK_THROWS_AS(norm_equivalence_gap(1.2 * b.w, b.ew), PreconditionError);
}

TEST_CASE("kq window and weight") {
  const auto [lo4, hi4] = kq_inverse_window(4);
  CHECK(lo4 == doctest::Approx(0.25 - 1.0 / 12));
  CHECK(hi4 == doctest::Approx(0.25));
  const auto [lo3, hi3] = kq_inverse_window(3);
  CHECK(lo3 == doctest::Approx(1.0 / 6 - 1.0 / 24));
  CHECK(hi3 == doctest::Approx(1.0 / 6));
  for (int d : {3, 4, 5, 11}) {
    const auto [lo, hi] = kq_inverse_window(d);
    const double q = default_kq_exponent(d);
    CHECK(1.0 / q == doctest::Approx(0.5 * (lo + hi)));
  }

  const auto g = make_grid(4, 60.0, 1500, 1.003);
  CHECK(kq_weight(1.0, RadialField::zeros(g), 5.0) == 0.0);
  const auto gauss = RadialField::sample(g, [](double r) { return std::exp(-r * r / 2); });
  // ||e^{-r^2/2}||_5^5 in R^4 is pi^2 (2/5)^2 after int r^3 e^{-5r^2/2} dr = 2/25
  const double expected = std::pow(2 * M_PI * M_PI * 2.0 / 25.0, 0.2) * std::pow(3.0, 2.0 * (0.25 - 0.2));
  CHECK(kq_weight(3.0, gauss, 5.0) == doctest::Approx(expected).epsilon(1e-4));
  CHECK_THROWS_AS(kq_weight(1.0, gauss, 3.0), InvalidArgument);
  CHECK_THROWS_AS(kq_weight(1.0, gauss, 4.0), InvalidArgument);
  CHECK_THROWS_AS(kq_weight(0.0, gauss, 5.0), InvalidArgument);
}

TEST_CASE("kq weight is invariant under the joint scaling") {
  const auto g = make_grid(5, 60.0, 2500, 1.002);
  const auto u = RadialField::sample(g, [](double r) { return std::exp(-r * r / 2); });
  const double q = default_kq_exponent(5);
  const double k = kq_weight(1.0, u, q);
  for (double lam : {0.5, 2.0}) {
    const auto v = rescale(u, lam);
    CHECK(kq_weight(1.0 / (lam * lam), v, q) == doctest::Approx(k).epsilon(1e-4));
  }
}

TEST_CASE("energy and nehari are scale invariant") {
  const auto b = bubble(5);
  const auto u = 0.8 * b.w;
  for (double lam : {0.5, 2.0}) {
    const auto v = rescale(u, lam);
    CHECK(energy(v) == doctest::Approx(energy(u)).epsilon(1e-5));
    CHECK(nehari(v) == doctest::Approx(nehari(u)).epsilon(1e-5));
  }
}

TEST_CASE("critical_power") {
  CHECK(critical_power(0.0, 5) == 0.0);
  CHECK(critical_power(2.0, 3) == 32.0);
  CHECK(critical_power(-2.0, 4) == -8.0);
  CHECK(critical_power(-3.0, 6) == -9.0);
  CHECK(critical_power(4.0, 10) == 8.0);
  for (int d : {5, 7, 11})
    for (double s : {0.3, 1.7}) {
      CHECK(critical_power(s, d) == doctest::Approx(std::pow(s, 1.0 + 4.0 / (d - 2))).epsilon(1e-14));
      CHECK(critical_power(-s, d) == -critical_power(s, d));
    }
}
