#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

namespace critheat {

/**
 * Nodes 0 = r_0 < r_1 < ... < r_{n-1} = R for radial functions on R^d.
 *
 * Spacing is geometric, h_i = h_0 * stretch^i (uniform when stretch == 1).
 * Besides the nodes the grid carries the two discrete measures every
 * functional in the library is built from:
 *
 *   cell_volumes[i]      = omega_{d-1} * int_{dual cell i} r^{d-1} dr
 *   face_conductances[i] = omega_{d-1} * r_{i+1/2}^{d-1} / h_i
 *
 * so that sum_i c_i (u_{i+1}-u_i)^2 approximates ||grad u||^2 and
 * -(A u)_i / w_i is the radial Laplacian.
 */
class RadialGrid {
 public:
  RadialGrid(int d, double radius, std::size_t n, double stretch);

  int dim() const noexcept { return d_; }
  double radius() const noexcept { return radius_; }
  double stretch() const noexcept { return stretch_; }
  bool uniform() const noexcept { return stretch_ == 1.0; }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::span<const double> nodes() const noexcept { return nodes_; }
  double node(std::size_t i) const { return nodes_[i]; }
  double spacing(std::size_t i) const { return nodes_[i + 1] - nodes_[i]; }

  std::span<const double> cell_volumes() const noexcept { return cell_volumes_; }
  std::span<const double> face_conductances() const noexcept { return conductances_; }

 private:
  int d_;
  double radius_;
  double stretch_;
  std::vector<double> nodes_;
  std::vector<double> cell_volumes_;
  std::vector<double> conductances_;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

/// Throws InvalidArgument unless d >= 3, R > 0, n >= 16 and stretch in [1, 1.2].
GridPtr make_grid(int d, double radius, std::size_t n, double stretch);

/// Samples of a radial function on a grid. Values may temporarily hold
/// non-finite numbers (that is how corruption is detected), but every
/// operation that consumes a field checks before using it.
class RadialField {
 public:
  RadialField(GridPtr grid, std::vector<double> values);

  static RadialField zeros(GridPtr grid);

  template <class F>
  static RadialField sample(GridPtr grid, F&& f) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(grid->node(i));
    return RadialField(std::move(grid), std::move(v));
  }

  const RadialGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  int dim() const noexcept { return grid_->dim(); }
  std::size_t size() const noexcept { return values_.size(); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool finite() const noexcept;
  /// Throws CorruptionError naming `context` if any value is NaN/Inf.
  void require_finite(std::string_view context) const;

  double max_abs() const noexcept;
  double min_value() const noexcept;

  RadialField& operator*=(double a);
  RadialField& operator+=(const RadialField& other);
  RadialField& operator-=(const RadialField& other);

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

RadialField operator*(double a, RadialField u);
RadialField operator+(RadialField a, const RadialField& b);
RadialField operator-(RadialField a, const RadialField& b);

/// Gamma(k/2) for a positive integer k, by exact recursion from
/// Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
double gamma_half(int k);

/// Surface area of the unit (d-1)-sphere, 2 pi^{d/2} / Gamma(d/2).
double sphere_area(int d);

/// omega_{d-1} * int_0^R f(r) r^{d-1+moment} dr, treating f as piecewise linear
/// between nodes (product rule, exact for constant and linear f).
double radial_integral(const RadialField& f, int moment = 0);

/// Second-order first derivative; 0 at the origin, one-sided at R.
RadialField ddr(const RadialField& f);

/// Conservative radial Laplacian u_rr + (d-1)/r u_r. At the origin this is the
/// symmetric limit d * u_rr(0). The last node uses a one-sided stencil.
RadialField radial_laplacian(const RadialField& f);

/// sum_i c_i (u_{i+1}-u_i)(v_{i+1}-v_i): the discrete <grad u, grad v>.
double dirichlet_form(const RadialField& u, const RadialField& v);

/// sum_i w_i |u_i|^p with the lumped cell volumes.
double lumped_power_sum(const RadialField& u, double p);

/// Monotone cubic (PCHIP) interpolant of a field; zero beyond R.
class FieldInterpolant {
 public:
  explicit FieldInterpolant(const RadialField& f);
  double operator()(double r) const;
  double derivative(double r) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

}  // namespace critheat
