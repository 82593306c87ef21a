#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "critheat/config.hpp"
#include "critheat/decay_character.hpp"
#include "critheat/evolve.hpp"
#include "critheat/functionals.hpp"

namespace critheat {

enum class Expectation { None, Dissipative, Blowup };
std::string_view to_string(Expectation e);

struct SweepRow {
  std::string family;
  std::map<std::string, double> params;
  int d = 0;
  double energy_ratio = 0.0;    // E(u0) / E(W)
  double gradient_ratio = 0.0;  // ||grad u0|| / ||grad W||
  bool l2_finite = false;
  SetMembership membership;
  Expectation expected = Expectation::None;  // what the dichotomy predicts when its hypotheses hold
  bool hypotheses_hold = false;
  Verdict verdict;
  bool consistent_with_theorem = true;
  double wall_seconds = 0.0;
  std::shared_ptr<const Trajectory> trajectory;  // null when the run was skipped
};

/// Classifies u0 and, unless the margin is below 10 * tol_threshold, runs it.
SweepRow sweep_row(const RunConfig& cfg);

/// One row per sweep point of `cfg`, evaluated on `threads` workers. Row
/// order follows the config.
std::vector<SweepRow> dichotomy_sweep(const RunConfig& cfg, unsigned threads = 1);

/// Sweep over a parameter grid of one family in dimension d.
std::vector<SweepRow> dichotomy_sweep(const RunConfig& base, int d, const std::string& family,
                                      const std::vector<std::map<std::string, double>>& params,
                                      unsigned threads = 1);

struct DecayFit {
  bool log_law = false;     // d > 10: slope of log ||u||^2_H1 against log ln(e+t)
  double exponent = 0.0;    // fitted slope
  double intercept = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  std::size_t samples = 0;
  double r2 = 0.0;
  bool accepted = false;    // r2 >= 0.98
  double q_star = 0.0;      // r*(Lambda u0)
  double predicted = 0.0;   // min{d/2 + q*, 1}; 2 for the log law
  bool envelope_ok = true;  // exponent <= -predicted + fit_tol
};

inline constexpr double kDecayEnvelopeTolerance = 0.15;

/// Power-law fit of ||u(t)||^2_H1 against 1+t on [2, min((R/8)^2, t_end)].
/// Throws WindowTooShort for less than a decade or fewer than 12 samples.
DecayFit decay_fit(const Trajectory& traj, const SpectrumFn& spec0,
                   double fit_tol = kDecayEnvelopeTolerance);

/// First snapshot index from which ||u||^2_H1 never increases by more than
/// slack * initial; nullopt if only the last snapshot qualifies.
std::optional<std::size_t> lyapunov_tail_start(const Trajectory& traj, double slack = 1e-10);

/// Energy never increases between snapshots beyond slack * |E(u0)|.
bool energy_nonincreasing(const Trajectory& traj, double slack = 1e-12);

struct LogLawCheck {
  double constant = 0.0;   // C fitted on the early half of the window
  double max_ratio = 0.0;  // max over the window of ||u||^2 ln(e+t)^2 / C
  bool holds = false;      // max_ratio <= 1 + slack
};

/// Upper bound ||u||^2_H1 <= C ln(e+t)^{-2} on the decay-fit window.
LogLawCheck log_law_bound(const Trajectory& traj, double slack = 1e-9);

enum class SplittingWeight { LogCubed, Power };
std::string_view to_string(SplittingWeight g);

struct SplittingPoint {
  double t0 = 0.0, t1 = 0.0;
  double ball_radius = 0.0;
  double lhs = 0.0;     // d/dt (g ||u||^2_H1), finite difference
  double rhs = 0.0;     // g' int_B |xi|^2 |u^|^2, checkpoint average
  double margin = 0.0;  // (rhs - lhs) / (g' ||u||^2_H1)
  bool flagged = false;
};

struct SplittingReport {
  SplittingWeight weight = SplittingWeight::LogCubed;
  double alpha = 0.0;    // exponent of the power weight
  double c_tilde = 0.0;  // fitted constant of the ball radius
  double tol_diag = 0.0;
  std::vector<SplittingPoint> points;
  std::size_t flagged = 0;
};

/// Fourier-splitting check between consecutive field checkpoints. C~ is the
/// largest constant with d/dt ||u||^2_H1 <= -C~ ||u||^2_H2 at every
/// checkpoint pair, clipped to (0, 2]. Throws MissingCheckpoint with fewer
/// than two checkpoints.
SplittingReport splitting_diagnostic(const Trajectory& traj, SplittingWeight weight,
                                     double alpha = 0.0, double tol_diag = 1e-2,
                                     double tail_tol = 1e-5);

struct NonlinearEstimate {
  double lhs = 0.0;    // <Lambda u, Lambda(|u|^{4/(d-2)} u)>
  double rhs = 0.0;    // ||u||_H1^{4/(d-2)} ||grad u||^2_H1
  double ratio = 0.0;  // lhs / rhs (0 when both vanish)
};

NonlinearEstimate nonlinear_estimate_check(const RadialField& u);

}  // namespace critheat
