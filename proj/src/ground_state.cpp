#include "critheat/ground_state.hpp"

#include <cmath>
#include <string>

#include "critheat/errors.hpp"
#include "critheat/functionals.hpp"

namespace critheat {

double critical_exponent(int d) { return 2.0 * d / (d - 2.0); }

double bubble_amplitude(int d) { return std::pow(d * (d - 2.0), (d - 2.0) / 4.0); }

double bubble_value(int d, double r) {
  return bubble_amplitude(d) * std::pow(1.0 + r * r, -(d - 2.0) / 2.0);
}

double bubble_derivative(int d, double r) {
  return -(d - 2.0) * bubble_amplitude(d) * r * std::pow(1.0 + r * r, -d / 2.0);
}

namespace {

// B(d/2 + 1, d/2 - 1)
double gradient_beta(int d) { return gamma_half(d + 2) * gamma_half(d - 2) / gamma_half(2 * d); }

}  // namespace

double bubble_gradient_norm_sq_exact(int d) {
  // (d-2)^2 A^2 int_0^inf r^{d+1} (1+r^2)^{-d} dr = (d-2)^2 A^2 B(d/2+1, d/2-1) / 2
  const double a = bubble_amplitude(d);
  return sphere_area(d) * (d - 2.0) * (d - 2.0) * a * a * 0.5 * gradient_beta(d);
}

RadialField aubin_talenti(const GroundStateSpec& spec, const GridPtr& grid) {
  if (spec.d != grid->dim())
    throw InvalidArgument("aubin_talenti: spec dimension " + std::to_string(spec.d) +
                          " does not match grid dimension " + std::to_string(grid->dim()));
  if (!(spec.lambda > 0.0)) throw InvalidArgument("aubin_talenti: lambda must be positive");
  const int d = spec.d;
  const double lam = spec.lambda;
  const double pre = std::pow(lam, -(d - 2.0) / 2.0);
  return RadialField::sample(grid, [&](double r) { return pre * bubble_value(d, r / lam); });
}

RadialField rescale(const RadialField& u, double lambda, double max_lost_fraction) {
  if (!(lambda > 0.0)) throw InvalidArgument("rescale: lambda must be positive");
  if (lambda == 1.0) return u;
  u.require_finite("rescale");
  const auto& g = u.grid();
  const int d = g.dim();

  if (lambda < 1.0) {
    // u_lambda on [0, R] only sees u on [0, lambda R]; the rest is lost.
    const auto c = g.face_conductances();
    const auto r = g.nodes();
    const auto v = u.values();
    double total = 0.0, lost = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double e = c[i] * (v[i + 1] - v[i]) * (v[i + 1] - v[i]);
      total += e;
      if (0.5 * (r[i] + r[i + 1]) > lambda * g.radius()) lost += e;
    }
    if (total > 0.0 && lost > max_lost_fraction * total)
      throw OutOfRangeError("rescale: lambda = " + std::to_string(lambda) + " pushes " +
                            std::to_string(lost / total) +
                            " of the gradient energy beyond R");
  }

  const FieldInterpolant interp(u);
  const double pre = std::pow(lambda, (d - 2.0) / 2.0);
  const double radius = g.radius();
  const double edge = u[u.size() - 1];
  // Beyond R the field is continued by the decaying harmonic tail u(R) (R/r)^{d-2}.
  return RadialField::sample(u.grid_ptr(), [&](double r) {
    const double x = lambda * r;
    if (x <= radius) return pre * interp(x);
    return pre * edge * std::pow(radius / x, d - 2.0);
  });
}

double pohozaev_residual(const RadialField& u) {
  return h1_norm_sq(u) - lp_norm_pow(u, critical_exponent(u.dim()));
}

double default_ground_state_radius(int d) {
  if (d < 3) throw InvalidArgument("default_ground_state_radius: d must be >= 3");
  // Gradient tail beyond R relative to the total is 2 R^{-(d-2)} / ((d-2) B).
  const double target = 1e-6;
  const double r = std::pow(2.0 / ((d - 2.0) * gradient_beta(d) * target), 1.0 / (d - 2.0));
  return std::max(40.0, 2.0 * r);
}

GridPtr default_ground_state_grid(int d) {
  const double radius = default_ground_state_radius(d);
  const double stretch = 1.001;
  const double h0 = 2.5e-4;
  const double steps = std::ceil(std::log1p(radius * (stretch - 1.0) / h0) / std::log(stretch));
  return make_grid(d, radius, static_cast<std::size_t>(steps) + 1, stretch);
}

double ground_state_energy(int d, const GridPtr& grid, double rel_tol) {
  if (grid->dim() != d) throw InvalidArgument("ground_state_energy: dimension mismatch");
  const auto w = aubin_talenti({d, 1.0}, grid);
  const double e = energy(w);
  const double e_grad = h1_norm_sq(w) / d;
  if (!(e > 0.0) || std::abs(e - e_grad) > rel_tol * std::abs(e))
    throw ConsistencyError("ground_state_energy: E(W) = " + std::to_string(e) +
                           " disagrees with ||grad W||^2/d = " + std::to_string(e_grad) +
                           " (grid too coarse or R too small)");
  return e;
}

}  // namespace critheat
