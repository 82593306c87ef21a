#pragma once

#include <cstdint>
#include <optional>

#include "critheat/config.hpp"
#include "critheat/decay_character.hpp"
#include "critheat/functionals.hpp"
#include "critheat/radial_field.hpp"

namespace critheat {

// Initial-data families. Every family is multiplied by a C-infinity taper that
// is 1 on [0, R/2] and 0 at R, so the data is compatible with the Dirichlet
// condition and the far field stays quiet.
//
//   aW              a * lambda^{-(d-2)/2} W(r / lambda)
//   aW_cutoff       the same times a smooth cutoff from 1 at rho_c to 0 at 2 rho_c;
//                   rho_c <= 0 searches for the smallest cutoff that puts the
//                   data in M- with margin > 10 * tol_threshold
//   gaussian        amplitude * exp(-r^2 / (2 width^2))
//   spectral_power  inverse transform of amplitude * s^k * exp(-b s^2)
//   bump            `count` random Gaussian shells (seeded), peak = amplitude

/// 1 for x <= 0, 0 for x >= 1, smooth and monotone in between.
double smooth_step_down(double x);

/// Taper on [0, R]: 1 up to R/2, 0 at R.
double taper(double r, double radius);

/// Grid for a run: explicit grid settings override the per-dimension default.
GridPtr make_run_grid(const RunConfig& cfg);

RadialField make_initial_field(const FamilyConfig& family, const GridPtr& grid, std::uint64_t seed,
                               double e_of_w, double tol_threshold = kDefaultThresholdTol);

/// E of the tapered W sampled on this grid. Used as the threshold for
/// set membership so that quadrature error on coarse run grids cancels.
double grid_ground_state_energy(const GridPtr& grid);

/// Closed-form spectrum of the untapered family, when one exists.
std::optional<SpectrumFn> family_spectrum(const FamilyConfig& family, int d);

/// Cutoff radius chosen by the aW_cutoff search (throws InvalidArgument when
/// no cutoff below R/4 works).
double find_cutoff_radius(int d, double a, double lambda, const GridPtr& grid, double e_of_w,
                          double tol_threshold);

}  // namespace critheat
