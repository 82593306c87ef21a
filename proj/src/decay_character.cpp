#include "critheat/decay_character.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include "pchip.hpp"
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "critheat/bessel.hpp"
#include "critheat/errors.hpp"
#include "critheat/ground_state.hpp"

namespace critheat {

namespace {

using Pchip = boost::math::interpolators::pchip<std::vector<double>>;
constexpr double kInf = std::numeric_limits<double>::infinity();

double bessel_order(int d) { return 0.5 * (d - 2); }

const Pchip& pchip_of(const std::shared_ptr<const void>& p) {
  return *static_cast<const Pchip*>(p.get());
}

// x K_1(x), equal to 1 at x = 0.
double x_k1(double x) {
  if (x == 0.0) return 1.0;
  if (x > 700.0) return 0.0;
  return x * std::cyl_bessel_k(1.0, x);
}

// Ordinary integral of f over [a, b] split at 1 for the infinite case.
template <class F>
double integrate_tail(F&& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
}

}  // namespace

std::string_view to_string(SpectrumKind k) {
  switch (k) {
    case SpectrumKind::GaussPower: return "gauss_power";
    case SpectrumKind::Bubble: return "bubble";
    case SpectrumKind::Tabulated: return "tabulated";
  }
  return "?";
}

SpectrumFn SpectrumFn::gauss_power(int d, double amplitude, double k, double b) {
  if (d < 3) throw InvalidArgument("gauss_power: d must be >= 3");
  if (!(b >= 0.0)) throw InvalidArgument("gauss_power: b must be nonnegative");
  SpectrumFn f;
  f.d_ = d;
  f.kind_ = SpectrumKind::GaussPower;
  f.params_ = {{"amplitude", amplitude}, {"k", k}, {"b", b}};
  std::ostringstream os;
  os << amplitude << " * s^" << k << " * exp(-" << b << " s^2)";
  f.description_ = os.str();
  return f;
}

SpectrumFn SpectrumFn::bubble(int d, double a, double lambda) {
  if (d < 3) throw InvalidArgument("bubble spectrum: d must be >= 3");
  if (!(lambda > 0.0)) throw InvalidArgument("bubble spectrum: lambda must be positive");
  SpectrumFn f;
  f.d_ = d;
  f.kind_ = SpectrumKind::Bubble;
  f.params_ = {{"a", a}, {"lambda", lambda}};
  std::ostringstream os;
  os << "transform of " << a << " * W_lambda, lambda = " << lambda;
  f.description_ = os.str();
  return f;
}

SpectrumFn SpectrumFn::tabulated(int d, std::vector<double> s, std::vector<double> v,
                                 std::string description) {
  if (d < 3) throw InvalidArgument("tabulated spectrum: d must be >= 3");
  if (s.size() != v.size() || s.size() < 4)
    throw InvalidArgument("tabulated spectrum: need >= 4 nodes with one value each");
  if (!(s.front() > 0.0) || s.front() >= 1e-3)
    throw InvalidArgument("tabulated spectrum: first node must lie in (0, 1e-3)");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw InvalidArgument("tabulated spectrum: nodes not increasing");
  for (double x : v)
    if (!std::isfinite(x)) throw CorruptionError("tabulated spectrum: non-finite value");
  SpectrumFn f;
  f.d_ = d;
  f.kind_ = SpectrumKind::Tabulated;
  f.description_ = std::move(description);
  f.s_ = s;
  f.v_ = v;
  f.interp_ = std::make_shared<const Pchip>(std::move(s), std::move(v));
  return f;
}

double SpectrumFn::s_max() const { return kind_ == SpectrumKind::Tabulated ? s_.back() : kInf; }

std::optional<double> SpectrumFn::low_power() const {
  switch (kind_) {
    case SpectrumKind::GaussPower: return params_.at("k") + symbol_power_;
    case SpectrumKind::Bubble: return -2.0 + symbol_power_;
    case SpectrumKind::Tabulated: return std::nullopt;
  }
  return std::nullopt;
}

double SpectrumFn::regular(double s) const {
  switch (kind_) {
    case SpectrumKind::GaussPower:
      return params_.at("amplitude") * std::exp(-params_.at("b") * s * s);
    case SpectrumKind::Bubble: {
      const double a = params_.at("a"), lam = params_.at("lambda");
      const double c = bubble_amplitude(d_) * std::pow(2.0, 2.0 - 0.5 * d_) / gamma_half(d_ - 2);
      return a * std::pow(lam, 0.5 * (d_ - 2)) * c * x_k1(lam * s);
    }
    case SpectrumKind::Tabulated:
      throw PreconditionError("regular: tabulated spectra have no closed form");
  }
  return 0.0;
}

double SpectrumFn::operator()(double s) const {
  if (s < 0.0) throw DomainError("spectrum evaluated at negative frequency");
  if (kind_ == SpectrumKind::Tabulated) {
    if (s > s_.back()) return 0.0;
    if (s <= s_.front()) return v_.front();
    return pchip_of(interp_)(s);
  }
  const double p = *low_power();
  if (s == 0.0) return p > 0.0 ? 0.0 : (p == 0.0 ? regular(0.0) : kInf);
  return std::pow(s, p) * regular(s);
}

SpectrumFn SpectrumFn::times_symbol(double m) const {
  if (kind_ == SpectrumKind::Tabulated) {
    std::vector<double> v(v_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(s_[i], m) * v_[i];
    std::ostringstream os;
    os << "s^" << m << " * [" << description_ << "]";
    return tabulated(d_, s_, std::move(v), os.str());
  }
  SpectrumFn f = *this;
  f.symbol_power_ += m;
  std::ostringstream os;
  os << "s^" << f.symbol_power_ << " * [" << description_ << "]";
  f.description_ = os.str();
  return f;
}

namespace {

// omega int_a^b w(s) |v(s)|^2 s^{d-1} ds over a tabulated spectrum.
template <class Weight>
double tabulated_mass(const SpectrumFn& spec, double a, double b, Weight&& weight) {
  const int d = spec.dim();
  const auto s = spec.nodes();
  const auto v = spec.values();
  double sum = 0.0;
  // Below the first node the profile is held constant.
  if (a < s.front()) {
    const double hi = std::min(b, s.front());
    auto f = [&](double x) { return weight(x) * v.front() * v.front() * std::pow(x, d - 1); };
    sum += boost::math::quadrature::gauss<double, 10>::integrate(f, a, hi);
  }
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const double lo = std::max(a, s[i]), hi = std::min(b, s[i + 1]);
    if (!(hi > lo)) continue;
    auto f = [&](double x) {
      const double y = spec(x);
      return weight(x) * y * y * std::pow(x, d - 1);
    };
    sum += boost::math::quadrature::gauss<double, 10>::integrate(f, lo, hi);
  }
  return sphere_area(d) * sum;
}

// omega int_0^rho w(s) |v(s)|^2 s^{d-1} ds for a closed form. With beta = 2p + d
// the substitution s = rho y^{1/beta} removes the low-frequency power.
template <class Weight>
double closed_form_head(const SpectrumFn& spec, double rho, Weight&& weight) {
  const int d = spec.dim();
  const double beta = 2.0 * *spec.low_power() + d;
  if (beta <= 0.0) return kInf;
  auto g = [&](double y) {
    const double s = rho * std::pow(y, 1.0 / beta);
    const double reg = spec.regular(s);
    return weight(s) * reg * reg;
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double inner = ts.integrate(g, 0.0, 1.0, 1e-13);
  return sphere_area(d) * std::pow(rho, beta) / beta * inner;
}

template <class Weight>
double spectral_mass(const SpectrumFn& spec, double rho, Weight&& weight) {
  if (!spec.closed_form()) return tabulated_mass(spec, 0.0, std::min(rho, spec.s_max()), weight);
  const double head_end = std::min(rho, 1.0);
  const double head = closed_form_head(spec, head_end, weight);
  if (!std::isfinite(head) || rho <= 1.0) return head;
  const int d = spec.dim();
  auto f = [&](double s) {
    const double y = spec(s);
    return weight(s) * y * y * std::pow(s, d - 1);
  };
  return head + sphere_area(d) * integrate_tail(f, 1.0, rho);
}

}  // namespace

double low_freq_mass(const SpectrumFn& spec, double rho) {
  if (!(rho > 0.0) || rho > spec.s_max())
    throw DomainError("low_freq_mass: rho = " + std::to_string(rho) + " outside (0, s_max]");
  return spectral_mass(spec, rho, [](double) { return 1.0; });
}

std::vector<double> decay_indicator(const SpectrumFn& spec, double r, std::span<const double> rhos) {
  std::vector<double> out;
  out.reserve(rhos.size());
  const int d = spec.dim();
  for (double rho : rhos) {
    if (!(rho > 0.0)) throw DomainError("decay_indicator: rho must be positive");
    out.push_back(std::pow(rho, -2.0 * r - d) * low_freq_mass(spec, rho));
  }
  return out;
}

DecayCharacterEstimate decay_character(const SpectrumFn& spec, double tol_fit) {
  const int d = spec.dim();
  DecayCharacterEstimate est;
  const auto [lo, hi] = est.window;
  if (spec.s_max() < hi)
    throw DomainError("decay_character: spectrum does not reach rho = 0.1");
  if (!spec.closed_form() && spec.nodes().front() > lo)
    throw DomainError("decay_character: spectrum not resolved down to rho = 1e-3");

  const auto rhos = spectrum_nodes(lo, hi, 12);
  std::vector<double> x, y;
  for (double rho : rhos) {
    const double f = low_freq_mass(spec, rho);
    if (!std::isfinite(f)) {
      // Not square integrable at the origin: no r > -d/2 can work.
      est.r_star = -0.5 * d;
      est.boundary = true;
      est.exists = false;
      est.p_r_value = kInf;
      est.fit_residual = 0.0;
      return est;
    }
    if (f <= 0.0) {
      est.r_star = kInf;
      est.exists = false;
      est.p_r_value = 0.0;
      return est;
    }
    x.push_back(std::log(rho));
    y.push_back(std::log(f));
  }
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double icept = (sy - slope * sx) / m;
  double resid = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    resid = std::max(resid, std::abs(y[i] - (icept + slope * x[i])));

  est.r_star = 0.5 * (slope - d);
  est.fit_residual = resid;
  est.exists = resid <= tol_fit;
  if (est.r_star <= -0.5 * d) {
    est.boundary = true;
    est.exists = false;
  }
  est.p_r_value = std::exp(y.front()) * std::pow(lo, -2.0 * est.r_star - d);
  return est;
}

SpectrumFn lambda_spectrum(const SpectrumFn& spec) { return spec.times_symbol(1.0); }

double linear_heat_l2_sq(const SpectrumFn& spec, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("linear_heat_l2_sq: t must be nonnegative");
  const double top = spec.s_max();
  return spectral_mass(spec, top, [t](double s) { return std::exp(-2.0 * t * s * s); });
}

std::pair<double, double> decay_bounds_check(const SpectrumFn& spec, double r_star,
                                             std::span<const double> t_grid) {
  if (t_grid.empty()) throw InvalidArgument("decay_bounds_check: empty time grid");
  const int d = spec.dim();
  double lo = kInf, hi = 0.0;
  for (double t : t_grid) {
    const double ratio = linear_heat_l2_sq(spec, t) * std::pow(1.0 + t, 0.5 * d + r_star);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
  }
  return {lo, hi};
}

std::vector<double> spectrum_nodes(double s_min, double s_max, std::size_t count) {
  if (!(s_min > 0.0) || !(s_max > s_min) || count < 2)
    throw InvalidArgument("spectrum_nodes: need 0 < s_min < s_max and count >= 2");
  std::vector<double> s(count);
  const double ratio = std::log(s_max / s_min) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) s[i] = s_min * std::exp(ratio * static_cast<double>(i));
  s.back() = s_max;
  return s;
}

SpectrumFn hankel_spectrum(const RadialField& u, std::span<const double> s_nodes, double tail_tol) {
  u.require_finite("hankel_spectrum");
  const auto& g = u.grid();
  const int d = g.dim();
  const double nu = bessel_order(d);
  const auto r = g.nodes();
  const double peak = u.max_abs();
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] >= 0.95 * g.radius() && std::abs(u[i]) > tail_tol * peak)
      throw TailMassError("hankel_spectrum: |u| = " + std::to_string(std::abs(u[i])) +
                          " at r = " + std::to_string(r[i]) + " exceeds " +
                          std::to_string(tail_tol) + " of the peak");
  }
  std::vector<double> s(s_nodes.begin(), s_nodes.end());
  std::vector<double> v(s.size(), 0.0);
  if (peak == 0.0) return SpectrumFn::tabulated(d, std::move(s), std::move(v), "hankel transform");

  const FieldInterpolant interp(u);
  std::size_t last = r.size() - 1;
  while (last > 0 && u[last] == 0.0 && u[last - 1] == 0.0) --last;

  using Gauss = boost::math::quadrature::gauss<double, 10>;
  for (std::size_t j = 0; j < s.size(); ++j) {
    const double sj = s[j];
    double sum = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
      if (u[i] == 0.0 && u[i + 1] == 0.0) continue;
      const double a = r[i], b = r[i + 1];
      // Sub-panels of at most half an oscillation of the kernel.
      const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) * sj / std::numbers::pi)));
      const double w = (b - a) / pieces;
      for (int k = 0; k < pieces; ++k) {
        auto f = [&](double x) {
          return interp(x) * std::pow(x, d - 1) * bessel_j_scaled(nu, x * sj);
        };
        sum += Gauss::integrate(f, a + k * w, a + (k + 1) * w);
      }
    }
    v[j] = sum;
  }
  return SpectrumFn::tabulated(d, std::move(s), std::move(v), "hankel transform");
}

RadialField heat_semigroup_field(const SpectrumFn& spec, double t, const GridPtr& grid) {
  if (!(t >= 0.0)) throw InvalidArgument("heat_semigroup_field: t must be nonnegative");
  const int d = spec.dim();
  if (grid->dim() != d) throw InvalidArgument("heat_semigroup_field: dimension mismatch");
  const double nu = bessel_order(d);

  // Frequency cutoff where exp(-t s^2) |v(s)| is below e^{-45} of its scale.
  double top = spec.s_max();
  if (spec.kind() == SpectrumKind::GaussPower) {
    const double b = spec.params().at("b") + t;
    if (b > 0.0) top = std::sqrt(45.0 / b);
  } else if (spec.kind() == SpectrumKind::Bubble) {
    top = 45.0 / spec.params().at("lambda");
    if (t > 0.0) top = std::min(top, std::sqrt(45.0 / t));
  } else if (t > 0.0) {
    top = std::min(top, std::sqrt(45.0 / t));
  }
  if (!std::isfinite(top))
    throw DomainError("heat_semigroup_field: spectrum does not decay; cannot invert");

  auto profile = [&](double s) { return spec(s) * std::exp(-t * s * s); };
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  boost::math::quadrature::tanh_sinh<double> ts;

  std::vector<double> out(grid->size(), 0.0);
  for (std::size_t i = 0; i + 1 < grid->size(); ++i) {
    const double ri = grid->node(i);
    auto f = [&](double s) {
      if (s == 0.0) return 0.0;
      return profile(s) * std::pow(s, d - 1) * bessel_j_scaled(nu, ri * s);
    };
    const double panel = ri > 0.0 ? std::min(top, 2.0 * std::numbers::pi / ri) : top;
    const double first = std::min(panel, top);
    double sum = ts.integrate(f, 0.0, first, 1e-12);
    const int pieces = static_cast<int>(std::ceil((top - first) / panel - 1e-9));
    const double w = pieces > 0 ? (top - first) / pieces : 0.0;
    for (int k = 0; k < pieces; ++k) sum += Gauss::integrate(f, first + k * w, first + (k + 1) * w);
    out[i] = sum;
  }
  return RadialField(grid, std::move(out));
}

void write_spectrum(const std::filesystem::path& path, const SpectrumFn& spec,
                    std::span<const double> s_nodes) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write spectrum " + path.string());
  out << "# critheat spectrum v1\n";
  out << "# d " << spec.dim() << "\n# kind " << to_string(spec.kind())
      << "\n# normalization unitary\n# description " << spec.description() << "\n";
  out << std::setprecision(17);
  if (spec.closed_form()) {
    for (double s : s_nodes) out << s << ' ' << spec(s) << '\n';
  } else {
    for (std::size_t i = 0; i < spec.nodes().size(); ++i)
      out << spec.nodes()[i] << ' ' << spec.values()[i] << '\n';
  }
  if (!out) throw IoError("short write to spectrum " + path.string());
}

SpectrumFn read_spectrum(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spectrum " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "# critheat spectrum v1")
    throw IoError("spectrum " + path.string() + ": unsupported header '" + line + "'");
  int d = 0;
  std::string description = "imported from " + path.string();
  std::vector<double> s, v;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      hs >> key;
      if (key == "d") hs >> d;
      if (key == "normalization") {
        std::string norm;
        hs >> norm;
        if (norm != "unitary")
          throw IoError("spectrum " + path.string() + ": unsupported normalization " + norm);
      }
      continue;
    }
    std::istringstream row(line);
    double a = 0, b = 0;
    if (!(row >> a >> b)) throw IoError("spectrum " + path.string() + ": malformed row '" + line + "'");
    s.push_back(a);
    v.push_back(b);
  }
  if (d < 3) throw IoError("spectrum " + path.string() + ": missing dimension");
  return SpectrumFn::tabulated(d, std::move(s), std::move(v), std::move(description));
}

}  // namespace critheat
