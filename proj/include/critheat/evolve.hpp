#pragma once

#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "critheat/config.hpp"
#include "critheat/functionals.hpp"
#include "critheat/radial_field.hpp"

namespace critheat {

struct StepperOptions {
  double tol = 2e-4;  // local error per unit of reaction time, relative to max|u|
  double dt_min = 1e-12;
  double dt_max = 1e4;
  double reaction_limit = 0.25;  // cap on dt * p * max|u|^{p-1} for the explicit term
  Nonlinearity nonlinearity = Nonlinearity::Focusing;
};

struct SolverState {
  double t = 0.0;
  RadialField u;
  double dt = 1e-4;
  std::size_t step_count = 0;
  double accumulated_dissipation = 0.0;  // int ||d_t u||^2 since t = 0
};

/// One accepted IMEX step of u_t = Delta u + |u|^{4/(d-2)} u with step-doubling
/// error control. Diffusion is backward Euler, the power nonlinearity forward
/// Euler; Dirichlet at R, symmetry at the origin. The step never crosses
/// `t_stop`. Throws StepCollapse when dt * max(1, max|u|^{p-1}) falls below dt_min.
///
/// Time is measured in units of the reaction time max(1, max|u|^{p-1})^{-1},
/// so an approach to blowup costs a number of steps logarithmic in the
/// amplitude instead of a power of it.
SolverState step(const SolverState& state, const StepperOptions& opts,
                 double t_stop = std::numeric_limits<double>::infinity());

/// One raw backward/forward Euler update with the dissipation it contributes,
/// (u1 - u0)^T M (u1 - u0) / dt. Exposed for tests.
struct EulerUpdate {
  RadialField u;
  double dissipation = 0.0;
};
EulerUpdate imex_euler(const RadialField& u, double dt, Nonlinearity nl);

enum class EventKind { NehariSignChange, GradientCrossesGroundState };
std::string_view to_string(EventKind k);

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::NehariSignChange;
};

struct Snapshot {
  double t = 0.0;
  EnergyReport report;
  double dt = 0.0;
  double kq = 0.0;
  double max_abs = 0.0;
  double min_value = 0.0;
  double dissipation = 0.0;  // accumulated since t = 0
  std::optional<RadialField> field;
};

enum class VerdictKind { Dissipative, Blowup, Undecided };
std::string_view to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Undecided;
  double t_end = 0.0;
  double final_h1_sq = 0.0;         // Dissipative detail
  double blowup_lo = 0.0;           // Blowup detail: bracket for the maximal time
  double blowup_hi = 0.0;
  std::string reason;               // Undecided detail (reason code) or trigger
  bool nehari_negative_throughout = false;
};

struct Trajectory {
  GridPtr grid;
  double e_of_w = 0.0;
  double initial_h1_sq = 0.0;
  double kq_exponent = 0.0;
  std::vector<Snapshot> snapshots;
  std::vector<Event> events;
  Verdict verdict;
  std::size_t steps = 0;
};

struct EvolveOptions {
  StepperOptions stepper;
  double dt_initial = 1e-4;
  double t_max = 1e6;
  SnapshotConfig snapshots;
  VerdictConfig verdict;
  double e_of_w = 0.0;  // 0: computed from the default ground-state grid
};

/// Integrates from u0 at t = 0 until a verdict fires or t_max is reached.
Trajectory evolve(const RadialField& u0, const EvolveOptions& opts);

/// Builds the initial field from the config's family and evolves it.
Trajectory run(const RunConfig& cfg);

EvolveOptions evolve_options(const RunConfig& cfg);

/// Snapshot times after t = 0 up to t_max.
std::vector<double> snapshot_times(const SnapshotConfig& cfg, double t_max);

/// ||u||^2_H1 below eps_dissip_rel * initial and the K^q weight strictly
/// decreasing over the last kq_window snapshot pairs (or u identically zero).
bool detect_dissipation(const Trajectory& traj, const VerdictConfig& cfg);

/// Amplitude above amp_cap, or gradient norm above blowup_factor * initial
/// while the step has collapsed (dt < dt_min).
bool detect_blowup(const SolverState& state, const Trajectory& traj, const VerdictConfig& cfg,
                   double dt_min);

struct EnergyIdentity {
  double residual = 0.0;      // |E(t1) + D(t0, t1) - E(t0)|
  double dissipation = 0.0;   // D(t0, t1)
  double energy_t0 = 0.0;
  double energy_t1 = 0.0;
  bool energy_inequality = true;  // E(t1) <= E(t0) + tol
};

/// Requires field checkpoints at both times (MissingCheckpoint otherwise).
EnergyIdentity energy_identity_residual(const Trajectory& traj, double t0, double t1);

/// Versioned text checkpoint: header (version, d, R, n, stretch, t) then r_i u_i.
void write_checkpoint(const std::filesystem::path& path, const RadialField& u, double t);
struct Checkpoint {
  RadialField u;
  double t = 0.0;
};
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// E(W) on the default ground-state grid, cached per dimension.
double reference_ground_state_energy(int d);

}  // namespace critheat
