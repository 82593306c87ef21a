#include "critheat/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <sstream>

#include "critheat/errors.hpp"
#include "critheat/ground_state.hpp"
#include "critheat/initial_data.hpp"

namespace critheat {

namespace {

double nonlinearity_sign(Nonlinearity nl) {
  switch (nl) {
    case Nonlinearity::Focusing: return 1.0;
    case Nonlinearity::Defocusing: return -1.0;
    case Nonlinearity::None: return 0.0;
  }
  return 0.0;
}

double max_abs_diff(const RadialField& a, const RadialField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

EulerUpdate imex_euler(const RadialField& u, double dt, Nonlinearity nl) {
  const auto& g = u.grid();
  const std::size_t n = g.size();
  const std::size_t m = n - 1;  // free nodes 0..n-2, node n-1 is Dirichlet
  const auto w = g.cell_volumes();
  const auto c = g.face_conductances();
  const double sigma = nonlinearity_sign(nl);
  const int d = g.dim();

  // (M + dt A) u1 = M (u0 + dt sigma N(u0)), solved by the Thomas algorithm.
  std::vector<double> diag(m), upper(m), rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double left = i > 0 ? c[i - 1] : 0.0;
    diag[i] = w[i] + dt * (c[i] + left);
    upper[i] = i + 1 < m ? -dt * c[i] : 0.0;
    const double forcing = sigma == 0.0 ? 0.0 : sigma * critical_power(u[i], d);
    rhs[i] = w[i] * (u[i] + dt * forcing);
  }
  for (std::size_t i = 1; i < m; ++i) {
    const double f = upper[i - 1] / diag[i - 1];  // sub-diagonal equals upper (symmetric)
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  std::vector<double> out(n, 0.0);
  out[m - 1] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) out[i] = (rhs[i] - upper[i] * out[i + 1]) / diag[i];

  double diss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double delta = out[i] - u[i];
    diss += w[i] * delta * delta;
  }
  return {RadialField(u.grid_ptr(), std::move(out)), diss / dt};
}

SolverState step(const SolverState& state, const StepperOptions& opts, double t_stop) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("step: tol must be positive");
  state.u.require_finite("step");
  const int d = state.u.dim();
  const double peak = state.u.max_abs();
  const double reaction = std::pow(peak, 4.0 / (d - 2.0));
  const double rate = std::max(1.0, reaction);
  double dt_cap = opts.dt_max;
  if (opts.nonlinearity != Nonlinearity::None && reaction > 0.0)
    dt_cap = std::min(dt_cap, opts.reaction_limit / ((d + 2.0) / (d - 2.0) * reaction));
  double dt = std::min(state.dt, dt_cap);
  bool clipped = false;
  if (state.t + dt >= t_stop) {
    dt = t_stop - state.t;
    clipped = true;
  }
  if (!(dt > 0.0)) throw InvalidArgument("step: nothing to integrate before t_stop");
  if (clipped && dt * rate < opts.dt_min) {
    // Rounding left a sliver before t_stop; step onto it without integrating.
    SolverState next = state;
    next.t = t_stop;
    return next;
  }

  for (;;) {
    // dt_min is compared in reaction-time units, like the error budget.
    if (dt * rate < opts.dt_min)
      throw StepCollapse("step: dt fell below dt_min", state.t, dt);
    const auto full = imex_euler(state.u, dt, opts.nonlinearity);
    const auto half1 = imex_euler(state.u, 0.5 * dt, opts.nonlinearity);
    const auto half2 = imex_euler(half1.u, 0.5 * dt, opts.nonlinearity);
    if (!full.u.finite() || !half2.u.finite()) {
      dt *= 0.25;
      clipped = false;
      continue;
    }
    const double scale = std::max(half2.u.max_abs(), 1e-300);
    const double err = max_abs_diff(full.u, half2.u) / scale;
    // Error per unit step: first-order local error makes err/dt ~ dt.
    const double budget = opts.tol * dt * rate;
    const double fac = err > 0.0 ? 0.9 * budget / err : 2.0;
    if (err <= budget) {
      SolverState next{state.t + dt, half2.u, 0.0, state.step_count + 1,
                       state.accumulated_dissipation + half1.dissipation + half2.dissipation};
      if (clipped && t_stop - state.t == dt) next.t = t_stop;
      double proposal = dt * std::clamp(fac, 0.2, 2.0);
      if (clipped) proposal = std::max(proposal, std::min(state.dt, proposal * 4.0));
      next.dt = std::min(proposal, dt_cap);
      return next;
    }
    dt *= std::clamp(fac, 0.1, 0.9);
    clipped = false;
  }
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::NehariSignChange: return "nehari-sign-change";
    case EventKind::GradientCrossesGroundState: return "gradient-crosses-W";
  }
  return "?";
}

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Dissipative: return "Dissipative";
    case VerdictKind::Blowup: return "Blowup";
    case VerdictKind::Undecided: return "Undecided";
  }
  return "?";
}

std::vector<double> snapshot_times(const SnapshotConfig& cfg, double t_max) {
  if (!(cfg.t_first > 0.0) || cfg.per_decade < 1)
    throw InvalidArgument("snapshot_times: need t_first > 0 and per_decade >= 1");
  std::vector<double> times;
  for (int k = 0;; ++k) {
    const double t = cfg.t_first * std::pow(10.0, static_cast<double>(k) / cfg.per_decade);
    if (t >= t_max * (1.0 - 1e-12)) break;
    times.push_back(t);
  }
  times.push_back(t_max);
  return times;
}

double reference_ground_state_energy(int d) {
  static std::mutex mu;
  static std::map<int, double> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(d); it != cache.end()) return it->second;
  const double e = ground_state_energy(d, default_ground_state_grid(d));
  cache.emplace(d, e);
  return e;
}

bool detect_dissipation(const Trajectory& traj, const VerdictConfig& cfg) {
  const auto& s = traj.snapshots;
  if (s.size() < 2) return false;
  const auto& last = s.back();
  if (last.report.h1_sq == 0.0 && last.max_abs == 0.0) return true;
  if (!(last.report.h1_sq < cfg.eps_dissip_rel * traj.initial_h1_sq)) return false;
  const std::size_t k = static_cast<std::size_t>(cfg.kq_window);
  if (s.size() < k + 2) return false;  // t = 0 carries no K^q weight
  for (std::size_t i = s.size() - k; i < s.size(); ++i)
    if (!(s[i].kq < s[i - 1].kq)) return false;
  return true;
}

bool detect_blowup(const SolverState& state, const Trajectory& traj, const VerdictConfig& cfg,
                   double dt_min) {
  if (state.u.max_abs() > cfg.amp_cap) return true;
  if (state.dt < dt_min) {
    const double grad = std::sqrt(h1_norm_sq(state.u));
    return grad > cfg.blowup_factor * std::sqrt(traj.initial_h1_sq);
  }
  return false;
}

namespace {

Snapshot take_snapshot(const SolverState& s, const Trajectory& traj, bool keep_field) {
  Snapshot snap;
  snap.t = s.t;
  snap.report = energy_report(s.u, s.t);
  snap.dt = s.dt;
  snap.kq = s.t > 0.0 ? kq_weight(s.t, s.u, traj.kq_exponent) : 0.0;
  snap.max_abs = s.u.max_abs();
  snap.min_value = s.u.min_value();
  snap.dissipation = s.accumulated_dissipation;
  if (keep_field) snap.field = s.u;
  return snap;
}

void record_events(Trajectory& traj, double h1_w) {
  const auto& s = traj.snapshots;
  if (s.size() < 2) return;
  const auto& a = s[s.size() - 2].report;
  const auto& b = s.back().report;
  if ((a.nehari < 0.0) != (b.nehari < 0.0))
    traj.events.push_back({s.back().t, EventKind::NehariSignChange});
  if ((a.h1_sq < h1_w) != (b.h1_sq < h1_w))
    traj.events.push_back({s.back().t, EventKind::GradientCrossesGroundState});
}

bool nehari_negative_throughout(const Trajectory& traj) {
  return !traj.snapshots.empty() &&
         std::all_of(traj.snapshots.begin(), traj.snapshots.end(),
                     [](const Snapshot& s) { return s.report.nehari < 0.0; });
}

}  // namespace

Trajectory evolve(const RadialField& u0, const EvolveOptions& opts) {
  u0.require_finite("evolve: initial data");
  const int d = u0.dim();
  Trajectory traj;
  traj.grid = u0.grid_ptr();
  traj.e_of_w = opts.e_of_w > 0.0 ? opts.e_of_w : reference_ground_state_energy(d);
  traj.kq_exponent = default_kq_exponent(d);
  const double h1_w = d * traj.e_of_w;  // ||grad W||^2 = d E(W)

  RadialField u = u0;
  u[u.size() - 1] = 0.0;
  SolverState state{0.0, std::move(u), opts.dt_initial, 0, 0.0};
  traj.initial_h1_sq = h1_norm_sq(state.u);

  const int every = opts.snapshots.checkpoint_every;
  auto keep = [&](std::size_t index) { return every > 0 && index % every == 0; };

  try {
    traj.snapshots.push_back(take_snapshot(state, traj, keep(0)));
  } catch (const CorruptionError& e) {
    traj.verdict = {VerdictKind::Undecided, 0.0, 0.0, 0.0, 0.0, "corruption", false};
    return traj;
  }

  const auto times = snapshot_times(opts.snapshots, opts.t_max);
  std::size_t next = 0;
  auto& verdict = traj.verdict;
  bool done = false;
  while (!done && next < times.size()) {
    try {
      state = step(state, opts.stepper, times[next]);
    } catch (const StepCollapse& e) {
      SolverState collapsed = state;
      collapsed.dt = e.dt();
      if (detect_blowup(collapsed, traj, opts.verdict, opts.stepper.dt_min)) {
        verdict.kind = VerdictKind::Blowup;
        verdict.reason = "step-collapse";
        verdict.blowup_lo = state.t;
        verdict.blowup_hi = state.t + 2.0 * std::max(e.dt(), opts.stepper.dt_min);
      } else {
        verdict.kind = VerdictKind::Undecided;
        verdict.reason = "step-collapse";
      }
      break;
    } catch (const CorruptionError&) {
      verdict.kind = VerdictKind::Undecided;
      verdict.reason = "corruption";
      break;
    }

    if (state.u.max_abs() > opts.verdict.amp_cap) {
      // Remaining time of the ODE u' = u^p from the current peak, as a bracket width.
      const double p = 1.0 + 4.0 / (d - 2.0);
      const double peak = state.u.max_abs();
      const double ode = std::pow(peak, 1.0 - p) / (p - 1.0);
      verdict.kind = VerdictKind::Blowup;
      verdict.reason = "amplitude-cap";
      verdict.blowup_lo = state.t;
      verdict.blowup_hi = state.t + 2.0 * std::max(ode, state.dt);
      break;
    }

    if (state.t >= times[next]) {
      try {
        traj.snapshots.push_back(take_snapshot(state, traj, keep(traj.snapshots.size())));
      } catch (const CorruptionError&) {
        verdict.kind = VerdictKind::Undecided;
        verdict.reason = "corruption";
        break;
      }
      record_events(traj, h1_w);
      ++next;
      if (detect_dissipation(traj, opts.verdict)) {
        verdict.kind = VerdictKind::Dissipative;
        verdict.reason = "dissipation";
        done = true;
      }
    }
  }
  if (!done && verdict.reason.empty()) {
    verdict.kind = VerdictKind::Undecided;
    verdict.reason = "t_max";
  }
  verdict.t_end = state.t;
  verdict.final_h1_sq = h1_norm_sq(state.u);
  verdict.nehari_negative_throughout = nehari_negative_throughout(traj);
  traj.steps = state.step_count;
  return traj;
}

EvolveOptions evolve_options(const RunConfig& cfg) {
  EvolveOptions o;
  o.stepper.tol = cfg.integrator.tol;
  o.stepper.dt_min = cfg.integrator.dt_min;
  o.stepper.dt_max = cfg.integrator.dt_max;
  o.stepper.nonlinearity = cfg.integrator.nonlinearity;
  o.dt_initial = cfg.integrator.dt_initial;
  o.t_max = cfg.integrator.t_max;
  o.snapshots = cfg.snapshots;
  o.verdict = cfg.verdict;
  return o;
}

Trajectory run(const RunConfig& cfg) {
  const auto grid = make_run_grid(cfg);
  auto opts = evolve_options(cfg);
  opts.e_of_w = grid_ground_state_energy(grid);
  const auto u0 =
      make_initial_field(cfg.initial, grid, cfg.seed, opts.e_of_w, cfg.verdict.tol_threshold);
  return evolve(u0, opts);
}

namespace {

const Snapshot& find_snapshot(const Trajectory& traj, double t) {
  for (const auto& s : traj.snapshots)
    if (std::abs(s.t - t) <= 1e-9 * std::max(1.0, std::abs(t))) return s;
  throw MissingCheckpoint("no snapshot at t = " + std::to_string(t));
}

}  // namespace

EnergyIdentity energy_identity_residual(const Trajectory& traj, double t0, double t1) {
  if (!(t0 < t1)) throw InvalidArgument("energy_identity_residual: need t0 < t1");
  const auto& a = find_snapshot(traj, t0);
  const auto& b = find_snapshot(traj, t1);
  if (!a.field || !b.field)
    throw MissingCheckpoint("energy_identity_residual: no field checkpoint at t = " +
                            std::to_string(!a.field ? t0 : t1));
  EnergyIdentity r;
  r.energy_t0 = energy(*a.field);
  r.energy_t1 = energy(*b.field);
  r.dissipation = b.dissipation - a.dissipation;
  r.residual = std::abs(r.energy_t1 + r.dissipation - r.energy_t0);
  r.energy_inequality = r.energy_t1 <= r.energy_t0 + 1e-12 * std::abs(r.energy_t0);
  return r;
}

void write_checkpoint(const std::filesystem::path& path, const RadialField& u, double t) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  const auto& g = u.grid();
  out << "# critheat checkpoint v1\n" << std::setprecision(17);
  out << "d " << g.dim() << "\nradius " << g.radius() << "\nnodes " << g.size() << "\nstretch "
      << g.stretch() << "\nt " << t << "\n";
  for (std::size_t i = 0; i < g.size(); ++i) out << g.node(i) << ' ' << u[i] << '\n';
  if (!out) throw IoError("short write to checkpoint " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read checkpoint " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "# critheat checkpoint v1")
    throw IoError("checkpoint " + path.string() + ": unsupported header '" + line + "'");
  int d = 0;
  double radius = 0, stretch = 0, t = 0;
  std::size_t n = 0;
  std::string key;
  in >> key >> d >> key >> radius >> key >> n >> key >> stretch >> key >> t;
  if (!in) throw IoError("checkpoint " + path.string() + ": malformed header");
  auto grid = make_grid(d, radius, n, stretch);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0;
    in >> r >> v[i];
    if (!in) throw IoError("checkpoint " + path.string() + ": truncated at row " + std::to_string(i));
    if (std::abs(r - grid->node(i)) > 1e-12 * std::max(1.0, r))
      throw IoError("checkpoint " + path.string() + ": node mismatch at row " + std::to_string(i));
  }
  return {RadialField(std::move(grid), std::move(v)), t};
}

}  // namespace critheat
