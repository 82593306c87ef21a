#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "critheat/radial_field.hpp"

namespace critheat {

// Every functional here is built from the grid's lumped measures (see
// RadialGrid), which are the same ones the time stepper uses. That makes the
// discrete energy an exact Lyapunov function of the discrete flow.

/// ||grad u||^2 (the squared H^1-dot norm).
double h1_norm_sq(const RadialField& u);

/// ||u||_{L^p}^p.
double lp_norm_pow(const RadialField& u, double p);

/// ||Delta u||^2 over the free nodes (the squared H^2-dot norm).
double h2_norm_sq(const RadialField& u);

/// Fraction of ||u||_{L^2}^2 that a power-law extrapolation places beyond the
/// last half of the grid; +inf when the extrapolated tail diverges.
double l2_tail_fraction(const RadialField& u);

struct EnergyReport {
  double t = 0.0;
  double h1_sq = 0.0;
  double l2star_pow = 0.0;
  double energy = 0.0;
  double nehari = 0.0;
  std::optional<double> l2_sq;  // absent when the far-field tail is > 1%
};

/// Computes every scalar at once; energy and nehari are formed from the same
/// two sums so the identities E = h1/2 - l2star/2*, J = h1 - l2star hold exactly.
EnergyReport energy_report(const RadialField& u, double t = 0.0);

double energy(const RadialField& u);
double nehari(const RadialField& u);

enum class SetVerdict { MPlus, MMinus, AboveThreshold, AtThreshold };
std::string_view to_string(SetVerdict v);

struct SetMembership {
  SetVerdict verdict = SetVerdict::AtThreshold;
  double e_of_w = 0.0;
  double energy = 0.0;
  double nehari = 0.0;
  double margin = 0.0;  // min(E(W) - E(u), |J(u)|)
};

/// Relative width of the AtThreshold band around E(W).
inline constexpr double kDefaultThresholdTol = 1e-5;

SetMembership classify_set(const RadialField& u, double e_of_w,
                           double tol_threshold = kDefaultThresholdTol);

/// (E - (1/2 - 1/2*)||grad u||^2, (1/2)||grad u||^2 - E); both nonnegative on M+.
/// Throws PreconditionError unless u is in M+.
std::pair<double, double> norm_equivalence_gap(const RadialField& u, double e_of_w,
                                               double tol_threshold = kDefaultThresholdTol);

/// Admissible open window (lo, hi) for 1/q in the K^q weight.
std::pair<double, double> kq_inverse_window(int d);
/// Midpoint of the window, returned as q.
double default_kq_exponent(int d);

/// t^{(d/2)(1/2* - 1/q)} ||u||_{L^q}.
double kq_weight(double t, const RadialField& u, double q);

/// Pointwise s -> |s|^{4/(d-2)} s, with s = 0 mapped to exactly 0.
double critical_power(double s, int d);

}  // namespace critheat
