#include "critheat/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "critheat/errors.hpp"
#include "critheat/ground_state.hpp"
#include "critheat/initial_data.hpp"

namespace critheat {

std::string_view to_string(Expectation e) {
  switch (e) {
    case Expectation::None: return "none";
    case Expectation::Dissipative: return "Dissipative";
    case Expectation::Blowup: return "Blowup";
  }
  return "?";
}

std::string_view to_string(SplittingWeight g) {
  switch (g) {
    case SplittingWeight::LogCubed: return "log_cubed";
    case SplittingWeight::Power: return "power";
  }
  return "?";
}

SweepRow sweep_row(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const int d = cfg.dimension;
  const auto grid = make_run_grid(cfg);
  auto opts = evolve_options(cfg);
  opts.e_of_w = grid_ground_state_energy(grid);
  const double tol = cfg.verdict.tol_threshold;
  const auto u0 = make_initial_field(cfg.initial, grid, cfg.seed, opts.e_of_w, tol);

  SweepRow row;
  row.family = cfg.initial.family;
  row.params = cfg.initial.params;
  row.d = d;
  row.membership = classify_set(u0, opts.e_of_w, tol);
  row.energy_ratio = row.membership.energy / opts.e_of_w;
  row.gradient_ratio = std::sqrt(h1_norm_sq(u0) / (d * opts.e_of_w));
  row.l2_finite = l2_tail_fraction(u0) <= 0.01;

  switch (row.membership.verdict) {
    case SetVerdict::MPlus:
      row.expected = Expectation::Dissipative;
      row.hypotheses_hold = true;
      break;
    case SetVerdict::MMinus:
      row.expected = Expectation::Blowup;
      row.hypotheses_hold = row.l2_finite;
      break;
    default: break;
  }

  const bool thin = row.membership.verdict == SetVerdict::AtThreshold ||
                    ((row.membership.verdict == SetVerdict::MPlus ||
                      row.membership.verdict == SetVerdict::MMinus) &&
                     row.membership.margin < 10.0 * tol * opts.e_of_w);
  if (thin) {
    row.hypotheses_hold = false;
    row.verdict.kind = VerdictKind::Undecided;
    row.verdict.reason = "margin";
  } else {
    auto traj = std::make_shared<Trajectory>(evolve(u0, opts));
    row.verdict = traj->verdict;
    row.trajectory = std::move(traj);
  }

  if (row.hypotheses_hold) {
    const auto k = row.verdict.kind;
    if (row.expected == Expectation::Dissipative && k == VerdictKind::Blowup)
      row.consistent_with_theorem = false;
    if (row.expected == Expectation::Blowup && k == VerdictKind::Dissipative)
      row.consistent_with_theorem = false;
  }
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepRow> dichotomy_sweep(const RunConfig& cfg, unsigned threads) {
  const auto& points = cfg.sweep;
  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= points.size()) return;
      try {
        rows[i] = sweep_row(point_config(cfg, points[i]));
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = points.size();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::vector<SweepRow> dichotomy_sweep(const RunConfig& base, int d, const std::string& family,
                                      const std::vector<std::map<std::string, double>>& params,
                                      unsigned threads) {
  RunConfig cfg = base;
  cfg.sweep.clear();
  const auto& fams = registered_families();
  auto it = fams.find(family);
  if (it == fams.end()) throw InvalidArgument("dichotomy_sweep: unknown family " + family);
  for (const auto& p : params) {
    SweepPoint pt;
    pt.dimension = d;
    pt.grid = default_run_grid(d);
    pt.initial.family = family;
    pt.initial.params = it->second;
    for (const auto& [k, v] : p) {
      if (!pt.initial.params.count(k))
        throw InvalidArgument("dichotomy_sweep: " + k + " is not a parameter of " + family);
      pt.initial.params[k] = v;
    }
    cfg.sweep.push_back(std::move(pt));
  }
  return dichotomy_sweep(cfg, threads);
}

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
  LineFit f;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  const double mean = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  f.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  return f;
}

std::pair<double, double> fit_window(const Trajectory& traj) {
  const double r8 = traj.grid->radius() / 8.0;
  return {2.0, std::min(r8 * r8, traj.verdict.t_end)};
}

}  // namespace

DecayFit decay_fit(const Trajectory& traj, const SpectrumFn& spec0, double fit_tol) {
  if (traj.verdict.kind != VerdictKind::Dissipative)
    throw PreconditionError("decay_fit: trajectory is not dissipative");
  const int d = traj.grid->dim();
  DecayFit fit;
  fit.window = fit_window(traj);
  const auto [lo, hi] = fit.window;
  std::vector<double> x, y;
  for (const auto& s : traj.snapshots) {
    if (s.t < lo || s.t > hi * (1.0 + 1e-12) || !(s.report.h1_sq > 0.0)) continue;
    x.push_back(s.t);
    y.push_back(std::log(s.report.h1_sq));
  }
  fit.samples = x.size();
  if (hi < 10.0 * lo || x.size() < 12)
    throw WindowTooShort("decay_fit: window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "] with " + std::to_string(x.size()) +
                         " samples (need one decade and 12 samples)");

  const auto ch = decay_character(lambda_spectrum(spec0));
  fit.q_star = ch.r_star;
  fit.log_law = d > 10;
  for (auto& t : x) t = fit.log_law ? std::log(std::log(std::exp(1.0) + t)) : std::log1p(t);
  const auto lf = least_squares(x, y);
  fit.exponent = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  fit.accepted = lf.r2 >= 0.98;
  if (fit.log_law) {
    fit.predicted = 2.0;
  } else {
    fit.predicted = std::min(0.5 * d + fit.q_star, 1.0);
  }
  fit.envelope_ok = fit.exponent <= -fit.predicted + fit_tol;
  return fit;
}

std::optional<std::size_t> lyapunov_tail_start(const Trajectory& traj, double slack) {
  const auto& s = traj.snapshots;
  if (s.size() < 2) return std::nullopt;
  const double tol = slack * traj.initial_h1_sq;
  std::size_t start = s.size() - 1;
  while (start > 0 && s[start].report.h1_sq <= s[start - 1].report.h1_sq + tol) --start;
  if (start == s.size() - 1) return std::nullopt;
  return start;
}

bool energy_nonincreasing(const Trajectory& traj, double slack) {
  const auto& s = traj.snapshots;
  if (s.empty()) return true;
  const double tol = slack * std::max(std::abs(s.front().report.energy), 1e-300);
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i].report.energy > s[i - 1].report.energy + tol) return false;
  return true;
}

LogLawCheck log_law_bound(const Trajectory& traj, double slack) {
  const auto [lo, hi] = fit_window(traj);
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : traj.snapshots)
    if (s.t >= lo && s.t <= hi * (1.0 + 1e-12)) pts.emplace_back(s.t, s.report.h1_sq);
  if (pts.size() < 4)
    throw WindowTooShort("log_law_bound: fewer than 4 snapshots in [" + std::to_string(lo) + ", " +
                         std::to_string(hi) + "]");
  auto scaled = [](double t, double v) {
    const double l = std::log(std::exp(1.0) + t);
    return v * l * l;
  };
  LogLawCheck c;
  const std::size_t half = pts.size() / 2;
  for (std::size_t i = 0; i < half; ++i) c.constant = std::max(c.constant, scaled(pts[i].first, pts[i].second));
  if (!(c.constant > 0.0)) throw PreconditionError("log_law_bound: zero solution on the window");
  for (const auto& [t, v] : pts) c.max_ratio = std::max(c.max_ratio, scaled(t, v) / c.constant);
  c.holds = c.max_ratio <= 1.0 + slack;
  return c;
}

namespace {

double weight_g(SplittingWeight w, double alpha, double t) {
  if (w == SplittingWeight::LogCubed) return std::pow(std::log(std::exp(1.0) + t), 3.0);
  return std::pow(1.0 + t, alpha);
}

double weight_dg(SplittingWeight w, double alpha, double t) {
  if (w == SplittingWeight::LogCubed) {
    const double l = std::log(std::exp(1.0) + t);
    return 3.0 * l * l / (std::exp(1.0) + t);
  }
  return alpha * std::pow(1.0 + t, alpha - 1.0);
}

}  // namespace

SplittingReport splitting_diagnostic(const Trajectory& traj, SplittingWeight weight, double alpha,
                                     double tol_diag, double tail_tol) {
  if (weight == SplittingWeight::Power && !(alpha > 0.0))
    throw InvalidArgument("splitting_diagnostic: power weight needs alpha > 0");
  std::vector<const Snapshot*> cps;
  for (const auto& s : traj.snapshots)
    if (s.field) cps.push_back(&s);
  if (cps.size() < 2)
    throw MissingCheckpoint("splitting_diagnostic: need at least two field checkpoints");

  SplittingReport rep;
  rep.weight = weight;
  rep.alpha = alpha;
  rep.tol_diag = tol_diag;

  std::vector<double> x(cps.size()), h2(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i) {
    x[i] = h1_norm_sq(*cps[i]->field);
    h2[i] = h2_norm_sq(*cps[i]->field);
  }
  double c = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
    const double h2m = 0.5 * (h2[i] + h2[i + 1]);
    if (!(h2m > 0.0)) continue;
    const double rate = -(x[i + 1] - x[i]) / (cps[i + 1]->t - cps[i]->t);
    c = std::min(c, rate / h2m);
  }
  rep.c_tilde = std::clamp(std::isfinite(c) ? c : 2.0, 1e-6, 2.0);

  std::vector<double> radius(cps.size() - 1);
  double top = 0.0;
  for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
    const double tm = 0.5 * (cps[i]->t + cps[i + 1]->t);
    radius[i] = std::sqrt(weight_dg(weight, alpha, tm) / (rep.c_tilde * weight_g(weight, alpha, tm)));
    top = std::max(top, radius[i]);
  }
  const double s_top = std::clamp(1.05 * top, 1.0, 80.0);
  const auto nodes = spectrum_nodes(1e-4, s_top, 320);
  std::vector<std::optional<SpectrumFn>> spectra(cps.size());
  for (std::size_t i = 0; i < cps.size(); ++i)
    spectra[i] = lambda_spectrum(hankel_spectrum(*cps[i]->field, nodes, tail_tol));

  for (std::size_t i = 0; i + 1 < cps.size(); ++i) {
    SplittingPoint p;
    p.t0 = cps[i]->t;
    p.t1 = cps[i + 1]->t;
    p.ball_radius = radius[i];
    const double tm = 0.5 * (p.t0 + p.t1);
    const double g0 = weight_g(weight, alpha, p.t0), g1 = weight_g(weight, alpha, p.t1);
    const double dg = weight_dg(weight, alpha, tm);
    p.lhs = (g1 * x[i + 1] - g0 * x[i]) / (p.t1 - p.t0);
    const double rho = std::min(radius[i], s_top);
    p.rhs = dg * 0.5 * (low_freq_mass(*spectra[i], rho) + low_freq_mass(*spectra[i + 1], rho));
    const double scale = dg * 0.5 * (x[i] + x[i + 1]);
    p.margin = scale > 0.0 ? (p.rhs - p.lhs) / scale : 0.0;
    p.flagged = p.margin < -tol_diag;
    if (p.flagged) ++rep.flagged;
    rep.points.push_back(p);
  }
  return rep;
}

NonlinearEstimate nonlinear_estimate_check(const RadialField& u) {
  u.require_finite("nonlinear_estimate_check");
  const int d = u.dim();
  auto n = RadialField::sample(u.grid_ptr(), [](double) { return 0.0; });
  for (std::size_t i = 0; i < u.size(); ++i) n[i] = critical_power(u[i], d);
  NonlinearEstimate e;
  e.lhs = dirichlet_form(u, n);
  e.rhs = std::pow(h1_norm_sq(u), 2.0 / (d - 2.0)) * h2_norm_sq(u);
  e.ratio = e.rhs > 0.0 ? e.lhs / e.rhs : 0.0;
  return e;
}

}  // namespace critheat
