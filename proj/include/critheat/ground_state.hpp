#pragma once

#include "critheat/radial_field.hpp"

namespace critheat {

/// Critical Sobolev exponent 2* = 2d/(d-2).
double critical_exponent(int d);

struct GroundStateSpec {
  int d = 3;
  double lambda = 1.0;  // scale; the bubble is lambda^{-(d-2)/2} W(r / lambda)
};

/// Amplitude (d(d-2))^{(d-2)/4} of the unit bubble.
double bubble_amplitude(int d);

/// Closed-form W(r) = A / (1 + r^2)^{(d-2)/2} and its radial derivative.
double bubble_value(int d, double r);
double bubble_derivative(int d, double r);

/// Exact ||grad W||^2 on R^d (a Beta-function integral); used only as an oracle.
double bubble_gradient_norm_sq_exact(int d);

/// Samples of the rescaled Aubin-Talenti bubble on `grid`.
RadialField aubin_talenti(const GroundStateSpec& spec, const GridPtr& grid);

/// u_lambda(r) = lambda^{(d-2)/2} u(lambda r), resampled on the same grid by
/// monotone cubic interpolation; beyond R the field is continued by the
/// harmonic tail u(R) (R/r)^{d-2}. Throws OutOfRangeError when lambda < 1
/// would leave more than `max_lost_fraction` of the gradient energy beyond R.
RadialField rescale(const RadialField& u, double lambda, double max_lost_fraction = 1e-3);

/// ||grad u||^2 - ||u||_{2*}^{2*}, signed.
double pohozaev_residual(const RadialField& u);

/// Default truncation radius for W in dimension d: the gradient-energy tail
/// of W beyond R is below 1e-6 of the total.
double default_ground_state_radius(int d);

/// Default (fine) grid used for ground-state calibration.
GridPtr default_ground_state_grid(int d);

/// E(W) by the energy quadrature, cross-checked against ||grad W||^2 / d.
/// Throws ConsistencyError when the two disagree by more than `rel_tol`.
double ground_state_energy(int d, const GridPtr& grid, double rel_tol = 1e-4);

}  // namespace critheat
