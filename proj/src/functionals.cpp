#include "critheat/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "critheat/errors.hpp"
#include "critheat/ground_state.hpp"

namespace critheat {

double h1_norm_sq(const RadialField& u) { return dirichlet_form(u, u); }

double lp_norm_pow(const RadialField& u, double p) { return lumped_power_sum(u, p); }

double h2_norm_sq(const RadialField& u) {
  const auto lap = radial_laplacian(u);
  const auto w = u.grid().cell_volumes();
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) s += w[i] * lap[i] * lap[i];
  return s;
}

double l2_tail_fraction(const RadialField& u) {
  const auto& g = u.grid();
  const auto r = g.nodes();
  const auto v = u.values();
  const auto w = g.cell_volumes();
  const double radius = g.radius();
  const double peak = u.max_abs();
  if (peak == 0.0) return 0.0;

  // Least-squares fit of log|u| against log r on [R/8, R/2].
  double sx = 0, sy = 0, sxx = 0, sxy = 0, band_max = 0;
  int m = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < radius / 8 || r[i] > radius / 2) continue;
    band_max = std::max(band_max, std::abs(v[i]));
    if (v[i] == 0.0) continue;
    const double x = std::log(r[i]), y = std::log(std::abs(v[i]));
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++m;
  }
  if (band_max <= 1e-12 * peak || m < 3) return 0.0;
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icept = (sy - slope * sx) / m;
  const double decay = -slope;
  const int d = g.dim();
  if (2.0 * decay <= d) return std::numeric_limits<double>::infinity();

  double head = 0.0;
  for (std::size_t i = 0; i < r.size() && r[i] <= radius / 2; ++i) head += w[i] * v[i] * v[i];
  const double half = radius / 2;
  const double at_half = std::exp(icept + slope * std::log(half));
  const double tail = sphere_area(d) * at_half * at_half * std::pow(half, d) / (2.0 * decay - d);
  return head > 0.0 ? tail / head : std::numeric_limits<double>::infinity();
}

EnergyReport energy_report(const RadialField& u, double t) {
  u.require_finite("energy_report");
  EnergyReport rep;
  rep.t = t;
  rep.h1_sq = h1_norm_sq(u);
  rep.l2star_pow = lp_norm_pow(u, critical_exponent(u.dim()));
  rep.energy = 0.5 * rep.h1_sq - rep.l2star_pow / critical_exponent(u.dim());
  rep.nehari = rep.h1_sq - rep.l2star_pow;
  if (!std::isfinite(rep.energy) || !std::isfinite(rep.nehari))
    throw CorruptionError("energy_report: functional overflowed at t = " + std::to_string(t));
  if (l2_tail_fraction(u) <= 0.01) rep.l2_sq = lp_norm_pow(u, 2.0);
  return rep;
}

double energy(const RadialField& u) {
  u.require_finite("energy");
  const double p = critical_exponent(u.dim());
  const double e = 0.5 * h1_norm_sq(u) - lp_norm_pow(u, p) / p;
  if (!std::isfinite(e)) throw CorruptionError("energy: overflow");
  return e;
}

double nehari(const RadialField& u) {
  u.require_finite("nehari");
  return h1_norm_sq(u) - lp_norm_pow(u, critical_exponent(u.dim()));
}

std::string_view to_string(SetVerdict v) {
  switch (v) {
    case SetVerdict::MPlus: return "M+";
    case SetVerdict::MMinus: return "M-";
    case SetVerdict::AboveThreshold: return "above-threshold";
    case SetVerdict::AtThreshold: return "at-threshold";
  }
  return "?";
}

SetMembership classify_set(const RadialField& u, double e_of_w, double tol_threshold) {
  u.require_finite("classify_set");
  const double p = critical_exponent(u.dim());
  const double h1 = h1_norm_sq(u);
  const double lp = lp_norm_pow(u, p);
  SetMembership m;
  m.e_of_w = e_of_w;
  m.energy = 0.5 * h1 - lp / p;
  m.nehari = h1 - lp;
  m.margin = std::min(e_of_w - m.energy, std::abs(m.nehari));
  const double band = tol_threshold * std::abs(e_of_w);
  if (std::abs(m.energy - e_of_w) <= band)
    m.verdict = SetVerdict::AtThreshold;
  else if (m.energy > e_of_w)
    m.verdict = SetVerdict::AboveThreshold;
  else
    m.verdict = m.nehari >= 0.0 ? SetVerdict::MPlus : SetVerdict::MMinus;
  return m;
}

std::pair<double, double> norm_equivalence_gap(const RadialField& u, double e_of_w,
                                               double tol_threshold) {
  const auto m = classify_set(u, e_of_w, tol_threshold);
  if (m.verdict != SetVerdict::MPlus)
    throw PreconditionError("norm_equivalence_gap: field is not in M+ (verdict " +
                            std::string(to_string(m.verdict)) + ")");
  const double p = critical_exponent(u.dim());
  const double h1 = h1_norm_sq(u);
  return {m.energy - (0.5 - 1.0 / p) * h1, 0.5 * h1 - m.energy};
}

std::pair<double, double> kq_inverse_window(int d) {
  const double p = critical_exponent(d);
  double lo = 1.0 / p - 1.0 / (d * (p - 1.0));
  const double hi = 1.0 / p;
  // The three-dimensional theory needs the narrower lower bound 1/2* - 1/24.
  if (d == 3) lo = std::max(lo, 1.0 / p - 1.0 / 24.0);
  return {lo, hi};
}

double default_kq_exponent(int d) {
  const auto [lo, hi] = kq_inverse_window(d);
  return 2.0 / (lo + hi);
}

double kq_weight(double t, const RadialField& u, double q) {
  const int d = u.dim();
  const auto [lo, hi] = kq_inverse_window(d);
  if (!(1.0 / q > lo && 1.0 / q < hi))
    throw InvalidArgument("kq_weight: q = " + std::to_string(q) +
                          " outside the admissible window 1/q in (" + std::to_string(lo) + ", " +
                          std::to_string(hi) + ")");
  if (!(t > 0.0)) throw InvalidArgument("kq_weight: t must be positive");
  u.require_finite("kq_weight");
  const double norm = std::pow(lp_norm_pow(u, q), 1.0 / q);
  if (norm == 0.0) return 0.0;
  const double expo = 0.5 * d * (1.0 / critical_exponent(d) - 1.0 / q);
  return std::pow(t, expo) * norm;
}

double critical_power(double s, int d) {
  if (s == 0.0) return 0.0;
  switch (d) {
    case 3: { const double s2 = s * s; return s2 * s2 * s; }
    case 4: return s * s * s;
    case 6: return std::abs(s) * s;
    case 10: return std::sqrt(std::abs(s)) * s;
    default: return std::exp((4.0 / (d - 2.0)) * std::log(std::abs(s))) * s;
  }
}

}  // namespace critheat
