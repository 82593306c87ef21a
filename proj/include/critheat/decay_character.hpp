#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critheat/radial_field.hpp"

namespace critheat {

// Fourier convention: unitary, v^(xi) = (2 pi)^{-d/2} int v(x) e^{-i x.xi} dx,
// so Plancherel has constant 1. For radial v this is the Hankel transform
//   v^(s) = int_0^inf v(r) r^{d-1} J_nu(rs) / (rs)^nu dr,   nu = (d-2)/2,
// which is its own inverse.

enum class SpectrumKind { GaussPower, Bubble, Tabulated };
std::string_view to_string(SpectrumKind k);

/**
 * Radial frequency profile s -> v^(s).
 *
 * Closed forms are multiplied by an extra symbol power s^m (m = 0 initially,
 * +1 per application of Lambda):
 *   GaussPower  amplitude * s^k * exp(-b s^2)
 *   Bubble      transform of a * lambda^{-(d-2)/2} W(r / lambda)
 * Tabulated spectra are interpolated monotonically between their nodes,
 * held constant below the first node and zero above the last.
 */
class SpectrumFn {
 public:
  static SpectrumFn gauss_power(int d, double amplitude, double k, double b);
  static SpectrumFn bubble(int d, double a, double lambda);
  static SpectrumFn tabulated(int d, std::vector<double> s, std::vector<double> v,
                              std::string description);

  int dim() const noexcept { return d_; }
  SpectrumKind kind() const noexcept { return kind_; }
  const std::string& description() const noexcept { return description_; }
  const std::map<std::string, double>& params() const noexcept { return params_; }
  double symbol_power() const noexcept { return symbol_power_; }
  bool closed_form() const noexcept { return kind_ != SpectrumKind::Tabulated; }

  double operator()(double s) const;
  /// Largest frequency carried (infinity for closed forms).
  double s_max() const;
  /// For closed forms: p with v^(s) = s^p * regular(s), regular(0) finite.
  std::optional<double> low_power() const;
  double regular(double s) const;

  /// Tabulated nodes and values (empty for closed forms).
  std::span<const double> nodes() const noexcept { return s_; }
  std::span<const double> values() const noexcept { return v_; }

  /// The spectrum multiplied by s^m.
  SpectrumFn times_symbol(double m) const;

 private:
  SpectrumFn() = default;
  int d_ = 3;
  SpectrumKind kind_ = SpectrumKind::GaussPower;
  std::string description_;
  std::map<std::string, double> params_;
  double symbol_power_ = 0.0;
  std::vector<double> s_, v_;
  std::shared_ptr<const void> interp_;
};

/// F(rho) = omega_{d-1} int_0^rho |v^(s)|^2 s^{d-1} ds; +inf when the
/// low-frequency singularity is not square integrable. DomainError for rho
/// outside (0, s_max].
double low_freq_mass(const SpectrumFn& spec, double rho);

/// rho^{-2r-d} F(rho) for each rho.
std::vector<double> decay_indicator(const SpectrumFn& spec, double r, std::span<const double> rhos);

struct DecayCharacterEstimate {
  double r_star = 0.0;
  std::pair<double, double> window{1e-3, 1e-1};
  double p_r_value = 0.0;     // rho^{-2r*-d} F(rho) at the low end of the window
  double fit_residual = 0.0;  // max |log F - fitted line| on the ladder
  bool exists = true;         // false when fit_residual > tol_fit
  bool boundary = false;      // r* <= -d/2: F diverges or does not vanish
};

inline constexpr double kDecayFitTolerance = 0.05;

/// Slope of log F against log rho on 12 geometric points of [1e-3, 1e-1]:
/// r* = (slope - d) / 2.
DecayCharacterEstimate decay_character(const SpectrumFn& spec, double tol_fit = kDecayFitTolerance);

/// s -> s v^(s), the symbol of Lambda = (-Delta)^{1/2}.
SpectrumFn lambda_spectrum(const SpectrumFn& spec);

/// ||e^{t Delta} v0||^2 = omega_{d-1} int exp(-2 t s^2) |v^(s)|^2 s^{d-1} ds.
double linear_heat_l2_sq(const SpectrumFn& spec, double t);

/// Extremes of ||v(t)||^2 (1+t)^{d/2+r*} over t_grid.
std::pair<double, double> decay_bounds_check(const SpectrumFn& spec, double r_star,
                                             std::span<const double> t_grid);

/// Geometric frequency ladder from s_min to s_max.
std::vector<double> spectrum_nodes(double s_min, double s_max, std::size_t count);

/// Tabulated spectrum of a field at the given frequencies. Throws
/// TailMassError when |u| near R exceeds tail_tol * max|u|.
SpectrumFn hankel_spectrum(const RadialField& u, std::span<const double> s_nodes,
                           double tail_tol = 1e-8);

/// The field of e^{t Delta} v0 on `grid`, by inverse transform of
/// exp(-t s^2) v^(s).
RadialField heat_semigroup_field(const SpectrumFn& spec, double t, const GridPtr& grid);

/// Two-column text export: header (d, kind, normalization), then s v^(s).
/// Closed forms are sampled on `s_nodes`.
void write_spectrum(const std::filesystem::path& path, const SpectrumFn& spec,
                    std::span<const double> s_nodes);
SpectrumFn read_spectrum(const std::filesystem::path& path);

}  // namespace critheat
