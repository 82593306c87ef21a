#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "critheat/config.hpp"
#include "critheat/decay_character.hpp"
#include "critheat/errors.hpp"
#include "critheat/evolve.hpp"
#include "critheat/experiments.hpp"
#include "critheat/initial_data.hpp"
#include "critheat/output.hpp"

namespace fs = std::filesystem;
using namespace critheat;

namespace {

enum Exit : int {
  kOk = 0,
  kPartial = 1,
  kConfig = 2,
  kIo = 3,
  kCorruption = 4,
  kInconsistent = 5,
};

struct Common {
  std::string config_path;
  std::string out;
  unsigned threads = 1;
  bool overwrite = false;
  long long seed = -1;
};

struct Session {
  RunConfig cfg;
  fs::path dir;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  nlohmann::ordered_json outputs = nlohmann::ordered_json::array();

  void add_output(const fs::path& p, const std::string& kind) {
    outputs.push_back({{"file", p.filename().string()}, {"kind", kind}});
  }
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Session open_session(const Common& c) {
  std::ifstream in(c.config_path);
  if (!in) throw IoError("cannot read config " + c.config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  Session s;
  s.cfg = parse_config(ss.str());
  if (!c.out.empty()) s.cfg.output_dir = c.out;
  if (c.seed >= 0) s.cfg.seed = static_cast<std::uint64_t>(c.seed);
  s.dir = s.cfg.output_dir;
  prepare_output_dir(s.dir, c.overwrite);
  return s;
}

void finish(Session& s, nlohmann::ordered_json manifest) {
  manifest["outputs"] = s.outputs;
  manifest["wall_seconds"] = s.elapsed();
  write_json(s.dir / "manifest.json", manifest);
}

void write_checkpoints(Session& s, const Trajectory& traj, const std::string& prefix) {
  std::size_t k = 0;
  for (const auto& snap : traj.snapshots) {
    if (!snap.field) continue;
    char name[64];
    std::snprintf(name, sizeof name, "%s_checkpoint_%04zu.txt", prefix.c_str(), k++);
    write_checkpoint(s.dir / name, *snap.field, snap.t);
    s.add_output(s.dir / name, "checkpoint");
  }
}

void write_trajectory(Session& s, const Trajectory& traj, const std::string& run) {
  CsvWriter csv(s.dir / "trajectory.csv", trajectory_header());
  write_trajectory_csv(csv, run, traj);
  csv.close();
  s.add_output(csv.path(), "trajectory");
}

int cmd_run(const Common& c) {
  auto s = open_session(c);
  const auto traj = run(s.cfg);
  write_trajectory(s, traj, "0");
  write_checkpoints(s, traj, "run");
  auto m = manifest_base("run", s.cfg);
  m["verdict"] = verdict_json(traj.verdict);
  m["steps"] = traj.steps;
  finish(s, m);
  std::cout << "verdict " << to_string(traj.verdict.kind) << " (" << traj.verdict.reason
            << ") at t = " << traj.verdict.t_end << "\n";
  return traj.verdict.reason == "corruption" ? kCorruption : kOk;
}

int cmd_sweep(const Common& c) {
  auto s = open_session(c);
  RunConfig cfg = s.cfg;
  if (cfg.sweep.empty()) cfg.sweep.push_back({cfg.dimension, cfg.initial, cfg.grid});
  const auto rows = dichotomy_sweep(cfg, c.threads);

  CsvWriter table(s.dir / "sweep.csv", sweep_header());
  CsvWriter traj(s.dir / "trajectories.csv", trajectory_header());
  int code = kOk;
  nlohmann::ordered_json walls = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    write_sweep_row(table, r);
    if (r.trajectory) write_trajectory_csv(traj, std::to_string(i), *r.trajectory);
    walls.push_back(r.wall_seconds);
    if (!r.consistent_with_theorem) code = kInconsistent;
    else if (code == kOk && (!r.hypotheses_hold || r.verdict.kind == VerdictKind::Undecided))
      code = kPartial;
    if (r.verdict.reason == "corruption" && code != kInconsistent) code = kCorruption;
  }
  table.close();
  traj.close();
  s.add_output(table.path(), "sweep");
  s.add_output(traj.path(), "trajectories");
  auto m = manifest_base("sweep", s.cfg);
  m["rows"] = rows.size();
  m["row_wall_seconds"] = walls;
  m["threads"] = c.threads;
  finish(s, m);
  std::cout << rows.size() << " rows, exit " << code << "\n";
  return code;
}

SpectrumFn initial_spectrum(const RunConfig& cfg) {
  if (auto spec = family_spectrum(cfg.initial, cfg.dimension)) return *spec;
  const auto grid = make_run_grid(cfg);
  const double e_of_w = grid_ground_state_energy(grid);
  const auto u0 = make_initial_field(cfg.initial, grid, cfg.seed, e_of_w, cfg.verdict.tol_threshold);
  return hankel_spectrum(u0, spectrum_nodes(1e-4, 40.0, 400));
}

int cmd_character(const Common& c) {
  auto s = open_session(c);
  const auto spec = initial_spectrum(s.cfg);
  CsvWriter csv(s.dir / "character.csv",
                {"family", "params", "d", "spectrum", "r_star", "fit_residual", "p_r_value", "exists",
                 "boundary"});
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  for (const auto& [label, sp] : {std::pair{"u0", spec}, std::pair{"lambda_u0", lambda_spectrum(spec)}}) {
    const auto est = decay_character(sp);
    csv.row({s.cfg.initial.family, format_params(s.cfg.initial.params), std::to_string(s.cfg.dimension),
             label, format_double(est.r_star), format_double(est.fit_residual),
             format_double(est.p_r_value), b(est.exists), b(est.boundary)});
  }
  csv.close();
  s.add_output(csv.path(), "character");
  write_spectrum(s.dir / "spectrum.txt", spec, spectrum_nodes(1e-4, 40.0, 400));
  s.add_output(s.dir / "spectrum.txt", "spectrum");
  auto m = manifest_base("character", s.cfg);
  m["spectrum"] = spec.description();
  finish(s, m);
  return kOk;
}

int cmd_decayfit(const Common& c) {
  auto s = open_session(c);
  const auto traj = run(s.cfg);
  write_trajectory(s, traj, "0");
  auto m = manifest_base("decayfit", s.cfg);
  m["verdict"] = verdict_json(traj.verdict);
  if (traj.verdict.kind != VerdictKind::Dissipative) {
    finish(s, m);
    std::cerr << "decayfit: run is not dissipative (" << to_string(traj.verdict.kind) << ")\n";
    return traj.verdict.reason == "corruption" ? kCorruption : kPartial;
  }
  DecayFit fit;
  try {
    fit = decay_fit(traj, initial_spectrum(s.cfg));
  } catch (const WindowTooShort& e) {
    m["error"] = e.what();
    finish(s, m);
    std::cerr << e.what() << "\n";
    return kPartial;
  }
  CsvWriter csv(s.dir / "decayfit.csv",
                {"family", "params", "d", "law", "q_star", "predicted", "exponent", "r2", "accepted",
                 "envelope_ok", "t_lo", "t_hi", "samples"});
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  csv.row({s.cfg.initial.family, format_params(s.cfg.initial.params), std::to_string(s.cfg.dimension),
           fit.log_law ? "log" : "power", format_double(fit.q_star), format_double(fit.predicted),
           format_double(fit.exponent), format_double(fit.r2), b(fit.accepted), b(fit.envelope_ok),
           format_double(fit.window.first), format_double(fit.window.second),
           std::to_string(fit.samples)});
  csv.close();
  s.add_output(csv.path(), "decayfit");
  finish(s, m);
  if (!fit.log_law && fit.accepted && !fit.envelope_ok) return kInconsistent;
  return fit.accepted ? kOk : kPartial;
}

int cmd_splitting(const Common& c, const std::string& weight, double alpha) {
  auto s = open_session(c);
  RunConfig cfg = s.cfg;
  if (cfg.snapshots.checkpoint_every == 0) cfg.snapshots.checkpoint_every = 4;
  const auto traj = run(cfg);
  write_trajectory(s, traj, "0");
  SplittingWeight g;
  if (weight == "log_cubed") g = SplittingWeight::LogCubed;
  else if (weight == "power") g = SplittingWeight::Power;
  else throw ConfigError("--weight: expected log_cubed or power");
  const auto rep = splitting_diagnostic(traj, g, alpha);
  CsvWriter csv(s.dir / "splitting.csv", {"t0", "t1", "ball_radius", "lhs", "rhs", "margin", "flagged"});
  for (const auto& p : rep.points)
    csv.row({format_double(p.t0), format_double(p.t1), format_double(p.ball_radius),
             format_double(p.lhs), format_double(p.rhs), format_double(p.margin),
             p.flagged ? "true" : "false"});
  csv.close();
  s.add_output(csv.path(), "splitting");
  auto m = manifest_base("splitting", s.cfg);
  m["verdict"] = verdict_json(traj.verdict);
  m["weight"] = std::string(to_string(g));
  m["c_tilde"] = rep.c_tilde;
  m["flagged"] = rep.flagged;
  finish(s, m);
  return rep.flagged > 0 ? kInconsistent : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critheat: energy-critical heat equation laboratory"};
  app.require_subcommand(1);
  Common common;
  std::string weight = "log_cubed";
  double alpha = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "config file (JSON)")->required();
    sub->add_option("--out", common.out, "output directory (overrides the config)");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--overwrite", common.overwrite, "replace an existing output directory");
    sub->add_option("--seed", common.seed, "seed for randomized families")->check(CLI::NonNegativeNumber);
  };
  auto* run_cmd = app.add_subcommand("run", "evolve one initial datum and classify it");
  auto* sweep_cmd = app.add_subcommand("sweep", "dichotomy sweep over the config's sweep points");
  auto* fit_cmd = app.add_subcommand("decayfit", "fit the decay rate of a dissipative run");
  auto* char_cmd = app.add_subcommand("character", "decay character of the initial data");
  auto* split_cmd = app.add_subcommand("splitting", "Fourier-splitting diagnostic along a run");
  for (auto* sub : {run_cmd, sweep_cmd, fit_cmd, char_cmd, split_cmd}) add_common(sub);
  split_cmd->add_option("--weight", weight, "log_cubed or power");
  split_cmd->add_option("--alpha", alpha, "exponent of the power weight");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*run_cmd) return cmd_run(common);
    if (*sweep_cmd) return cmd_sweep(common);
    if (*fit_cmd) return cmd_decayfit(common);
    if (*char_cmd) return cmd_character(common);
    if (*split_cmd) return cmd_splitting(common, weight, alpha);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const CorruptionError& e) {
    std::cerr << "numerical corruption: " << e.what() << "\n";
    return kCorruption;
  } catch (const ConsistencyError& e) {
    std::cerr << "numerical corruption: " << e.what() << "\n";
    return kCorruption;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kPartial;
  }
  return kOk;
}
