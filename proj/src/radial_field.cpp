#include "critheat/radial_field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "pchip.hpp"
#include <boost/math/quadrature/gauss.hpp>

#include "critheat/errors.hpp"

namespace critheat {

RadialGrid::RadialGrid(int d, double radius, std::size_t n, double stretch)
    : d_(d), radius_(radius), stretch_(stretch) {
  if (d < 3) throw InvalidArgument("make_grid: dimension must be >= 3, got " + std::to_string(d));
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw InvalidArgument("make_grid: radius must be positive");
  if (n < 16) throw InvalidArgument("make_grid: need at least 16 nodes, got " + std::to_string(n));
  if (!(stretch >= 1.0 && stretch <= 1.2))
    throw InvalidArgument("make_grid: stretch must lie in [1, 1.2]");

  nodes_.resize(n);
  const double last = static_cast<double>(n - 1);
  if (stretch == 1.0) {
    for (std::size_t i = 0; i < n; ++i) nodes_[i] = radius * (static_cast<double>(i) / last);
  } else {
    // r_i = R (s^i - 1) / (s^{n-1} - 1), evaluated through expm1.
    const double ls = std::log(stretch);
    const double denom = std::expm1(last * ls);
    for (std::size_t i = 0; i < n; ++i)
      nodes_[i] = radius * (std::expm1(static_cast<double>(i) * ls) / denom);
  }
  nodes_.front() = 0.0;
  nodes_.back() = radius;
  for (std::size_t i = 1; i < n; ++i)
    if (!(nodes_[i] > nodes_[i - 1]))
      throw InvalidArgument("make_grid: nodes not strictly increasing (spacing underflow)");

  const double omega = sphere_area(d);
  const double dd = static_cast<double>(d);
  cell_volumes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = i == 0 ? 0.0 : 0.5 * (nodes_[i - 1] + nodes_[i]);
    const double hi = i + 1 == n ? radius : 0.5 * (nodes_[i] + nodes_[i + 1]);
    cell_volumes_[i] = omega * (std::pow(hi, dd) - std::pow(lo, dd)) / dd;
  }
  conductances_.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mid = 0.5 * (nodes_[i] + nodes_[i + 1]);
    conductances_[i] = omega * std::pow(mid, dd - 1.0) / (nodes_[i + 1] - nodes_[i]);
  }
}

GridPtr make_grid(int d, double radius, std::size_t n, double stretch) {
  return std::make_shared<const RadialGrid>(d, radius, n, stretch);
}

RadialField::RadialField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw InvalidArgument("RadialField: null grid");
  if (values_.size() != grid_->size())
    throw InvalidArgument("RadialField: " + std::to_string(values_.size()) + " values for " +
                          std::to_string(grid_->size()) + " nodes");
}

RadialField RadialField::zeros(GridPtr grid) {
  std::vector<double> v(grid->size(), 0.0);
  return RadialField(std::move(grid), std::move(v));
}

bool RadialField::finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

void RadialField::require_finite(std::string_view context) const {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]))
      throw CorruptionError(std::string(context) + ": non-finite value at node " +
                            std::to_string(i) + " (r = " + std::to_string(grid_->node(i)) + ")");
  }
}

double RadialField::max_abs() const noexcept {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

double RadialField::min_value() const noexcept {
  return *std::min_element(values_.begin(), values_.end());
}

RadialField& RadialField::operator*=(double a) {
  for (double& x : values_) x *= a;
  return *this;
}

RadialField& RadialField::operator+=(const RadialField& other) {
  if (other.size() != size())
    throw InvalidArgument("RadialField: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

RadialField& RadialField::operator-=(const RadialField& other) {
  if (other.size() != size())
    throw InvalidArgument("RadialField: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

RadialField operator*(double a, RadialField u) { return u *= a; }
RadialField operator+(RadialField a, const RadialField& b) { return a += b; }
RadialField operator-(RadialField a, const RadialField& b) { return a -= b; }

double gamma_half(int k) {
  if (k <= 0) throw InvalidArgument("gamma_half: argument must be positive");
  double g = (k % 2 == 0) ? 1.0 : std::sqrt(std::numbers::pi);
  // Gamma(x + 1) = x Gamma(x), walking up from 1 or 1/2.
  for (int j = (k % 2 == 0) ? 2 : 1; j + 2 <= k; j += 2) g *= 0.5 * j;
  return g;
}

double sphere_area(int d) {
  if (d < 1) throw InvalidArgument("sphere_area: d must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / gamma_half(d);
}

double radial_integral(const RadialField& f, int moment) {
  if (moment < 0 || moment > 2) throw InvalidArgument("radial_integral: moment must be 0, 1 or 2");
  f.require_finite("radial_integral");
  const auto r = f.grid().nodes();
  const auto v = f.values();
  const double p = static_cast<double>(f.dim() - 1 + moment);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double a = r[i], b = r[i + 1], h = b - a, fa = v[i], fb = v[i + 1];
    if (fa == 0.0 && fb == 0.0) continue;
    auto integrand = [&](double x) { return (fa + (fb - fa) * (x - a) / h) * std::pow(x, p); };
    sum += boost::math::quadrature::gauss<double, 10>::integrate(integrand, a, b);
  }
  return sphere_area(f.dim()) * sum;
}

namespace {

struct Quadratic3 {
  // Derivative weights of the quadratic through (x0,x1,x2), evaluated at `at`.
  double d1[3];
  double d2[3];
};

Quadratic3 quadratic_weights(double x0, double x1, double x2, double at) {
  Quadratic3 q{};
  const double a = (x0 - x1) * (x0 - x2);
  const double b = (x1 - x0) * (x1 - x2);
  const double c = (x2 - x0) * (x2 - x1);
  q.d1[0] = (2.0 * at - x1 - x2) / a;
  q.d1[1] = (2.0 * at - x0 - x2) / b;
  q.d1[2] = (2.0 * at - x0 - x1) / c;
  q.d2[0] = 2.0 / a;
  q.d2[1] = 2.0 / b;
  q.d2[2] = 2.0 / c;
  return q;
}

}  // namespace

RadialField ddr(const RadialField& f) {
  const auto& g = f.grid();
  const std::size_t n = g.size();
  const auto r = g.nodes();
  const auto u = f.values();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const auto q = quadratic_weights(r[i - 1], r[i], r[i + 1], r[i]);
    out[i] = q.d1[0] * (u[i - 1] - u[i]) + q.d1[2] * (u[i + 1] - u[i]);
  }
  const auto q = quadratic_weights(r[n - 3], r[n - 2], r[n - 1], r[n - 1]);
  out[n - 1] = q.d1[0] * (u[n - 3] - u[n - 1]) + q.d1[1] * (u[n - 2] - u[n - 1]);
  return RadialField(f.grid_ptr(), std::move(out));
}

RadialField radial_laplacian(const RadialField& f) {
  const auto& g = f.grid();
  const std::size_t n = g.size();
  const auto r = g.nodes();
  const auto w = g.cell_volumes();
  const auto c = g.face_conductances();
  const auto u = f.values();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double flux = c[i] * (u[i + 1] - u[i]);
    if (i > 0) flux -= c[i - 1] * (u[i] - u[i - 1]);
    out[i] = flux / w[i];
  }
  const auto q = quadratic_weights(r[n - 3], r[n - 2], r[n - 1], r[n - 1]);
  // Weights sum to zero, so differences keep constants exact.
  const double urr = q.d2[0] * (u[n - 3] - u[n - 1]) + q.d2[1] * (u[n - 2] - u[n - 1]);
  const double ur = q.d1[0] * (u[n - 3] - u[n - 1]) + q.d1[1] * (u[n - 2] - u[n - 1]);
  out[n - 1] = urr + (g.dim() - 1) * ur / r[n - 1];
  return RadialField(f.grid_ptr(), std::move(out));
}

double dirichlet_form(const RadialField& u, const RadialField& v) {
  const auto c = u.grid().face_conductances();
  const auto a = u.values();
  const auto b = v.values();
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * (a[i + 1] - a[i]) * (b[i + 1] - b[i]);
  return s;
}

double lumped_power_sum(const RadialField& u, double p) {
  const auto w = u.grid().cell_volumes();
  const auto a = u.values();
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < a.size(); ++i) s += w[i] * a[i] * a[i];
  } else {
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0.0) s += w[i] * std::pow(std::abs(a[i]), p);
  }
  return s;
}

struct FieldInterpolant::Impl {
  double radius;
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

FieldInterpolant::FieldInterpolant(const RadialField& f) {
  std::vector<double> x(f.grid().nodes().begin(), f.grid().nodes().end());
  std::vector<double> y(f.values().begin(), f.values().end());
  const double radius = x.back();
  // Symmetry at the origin fixes the left slope to zero.
  impl_ = std::make_shared<const Impl>(
      Impl{radius, boost::math::interpolators::pchip<std::vector<double>>(
                       std::move(x), std::move(y), 0.0)});
}

double FieldInterpolant::operator()(double r) const {
  if (r > impl_->radius) return 0.0;
  return impl_->spline(std::max(r, 0.0));
}

double FieldInterpolant::derivative(double r) const {
  if (r > impl_->radius) return 0.0;
  return impl_->spline.prime(std::max(r, 0.0));
}

}  // namespace critheat
