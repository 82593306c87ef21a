#include "critheat/initial_data.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "critheat/errors.hpp"
#include "critheat/ground_state.hpp"

namespace critheat {

namespace {

double smooth_half(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double param(const FamilyConfig& f, const std::string& key) {
  if (auto it = f.params.find(key); it != f.params.end()) return it->second;
  const auto& fams = registered_families();
  if (auto fam = fams.find(f.family); fam != fams.end())
    if (auto it = fam->second.find(key); it != fam->second.end()) return it->second;
  throw InvalidArgument("family " + f.family + ": missing parameter " + key);
}

// Uniform in [0, 1) from the top 53 bits; keeps streams identical across
// standard libraries, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

RadialField bubble_field(int d, double a, double lambda, const GridPtr& grid, double rho_c) {
  const double radius = grid->radius();
  return RadialField::sample(grid, [&](double r) {
    double cut = 1.0;
    if (rho_c > 0.0) cut = smooth_step_down(r / rho_c - 1.0);
    const double w = std::pow(lambda, -0.5 * (d - 2)) * bubble_value(d, r / lambda);
    return a * w * cut * taper(r, radius);
  });
}

}  // namespace

double smooth_step_down(double x) {
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  const double a = smooth_half(1.0 - x), b = smooth_half(x);
  return a / (a + b);
}

double taper(double r, double radius) { return smooth_step_down(2.0 * r / radius - 1.0); }

GridPtr make_run_grid(const RunConfig& cfg) {
  const auto def = default_run_grid(cfg.dimension);
  const double radius = cfg.grid.radius > 0.0 ? cfg.grid.radius : def.radius;
  const std::size_t nodes = cfg.grid.nodes > 0 ? cfg.grid.nodes : def.nodes;
  const double stretch = cfg.grid.stretch > 0.0 ? cfg.grid.stretch : def.stretch;
  return make_grid(cfg.dimension, radius, nodes, stretch);
}

double grid_ground_state_energy(const GridPtr& grid) {
  return energy(bubble_field(grid->dim(), 1.0, 1.0, grid, 0.0));
}

double find_cutoff_radius(int d, double a, double lambda, const GridPtr& grid, double e_of_w,
                          double tol_threshold) {
  const double need = 10.0 * tol_threshold * e_of_w;
  for (double rho = 2.0 * lambda; 2.0 * rho <= 0.5 * grid->radius(); rho *= 1.25) {
    const auto u = bubble_field(d, a, lambda, grid, rho);
    const auto m = classify_set(u, e_of_w, tol_threshold);
    if (m.verdict == SetVerdict::MMinus && m.margin > need) return rho;
  }
  throw InvalidArgument("aW_cutoff: no cutoff radius up to R/4 puts a = " + std::to_string(a) +
                        " in M- with margin > 10 * tol_threshold");
}

RadialField make_initial_field(const FamilyConfig& family, const GridPtr& grid, std::uint64_t seed,
                               double e_of_w, double tol_threshold) {
  const int d = grid->dim();
  const double radius = grid->radius();
  const auto& name = family.family;

  if (name == "aW") {
    return bubble_field(d, param(family, "a"), param(family, "lambda"), grid, 0.0);
  }
  if (name == "aW_cutoff") {
    const double a = param(family, "a"), lambda = param(family, "lambda");
    double rho = param(family, "rho_c");
    if (rho <= 0.0) rho = find_cutoff_radius(d, a, lambda, grid, e_of_w, tol_threshold);
    return bubble_field(d, a, lambda, grid, rho);
  }
  if (name == "gaussian") {
    const double amp = param(family, "amplitude"), width = param(family, "width");
    if (!(width > 0.0)) throw InvalidArgument("gaussian: width must be positive");
    return RadialField::sample(grid, [&](double r) {
      return amp * std::exp(-0.5 * r * r / (width * width)) * taper(r, radius);
    });
  }
  if (name == "spectral_power") {
    const auto spec = *family_spectrum(family, d);
    auto u = heat_semigroup_field(spec, 0.0, grid);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= taper(grid->node(i), radius);
    return u;
  }
  if (name == "bump") {
    const double amp = param(family, "amplitude"), width = param(family, "width"),
                 spread = param(family, "spread");
    const int count = static_cast<int>(param(family, "count"));
    if (count < 1 || !(width > 0.0)) throw InvalidArgument("bump: need count >= 1 and width > 0");
    std::mt19937_64 rng(seed);
    struct Shell { double center, width, weight; };
    std::vector<Shell> shells(count);
    for (auto& s : shells) {
      s.center = spread * uniform01(rng);
      s.width = width * (0.5 + uniform01(rng));
      s.weight = 0.5 + 0.5 * uniform01(rng);
    }
    auto u = RadialField::sample(grid, [&](double r) {
      double v = 0.0;
      for (const auto& s : shells) {
        const double k = 0.5 / (s.width * s.width);
        // Mirrored pair keeps the profile even in r.
        v += s.weight * (std::exp(-k * (r - s.center) * (r - s.center)) +
                         std::exp(-k * (r + s.center) * (r + s.center)));
      }
      return v * taper(r, radius);
    });
    const double peak = u.max_abs();
    if (peak > 0.0) u *= amp / peak;
    return u;
  }
  std::string known;
  for (const auto& [k, v] : registered_families()) known += (known.empty() ? "" : ", ") + k;
  throw InvalidArgument("unknown family '" + name + "' (registered: " + known + ")");
}

std::optional<SpectrumFn> family_spectrum(const FamilyConfig& family, int d) {
  const auto& name = family.family;
  if (name == "aW") return SpectrumFn::bubble(d, param(family, "a"), param(family, "lambda"));
  if (name == "gaussian") {
    const double amp = param(family, "amplitude"), width = param(family, "width");
    return SpectrumFn::gauss_power(d, amp * std::pow(width, d), 0.0, 0.5 * width * width);
  }
  if (name == "spectral_power")
    return SpectrumFn::gauss_power(d, param(family, "amplitude"), param(family, "k"),
                                   param(family, "b"));
  return std::nullopt;
}

}  // namespace critheat
