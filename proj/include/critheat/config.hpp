#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace critheat {

enum class Nonlinearity { Focusing, Defocusing, None };

std::string_view to_string(Nonlinearity n);

struct GridConfig {
  double radius = 0.0;    // 0: per-dimension default (materialized by parse_config)
  std::size_t nodes = 0;
  double stretch = 0.0;

  bool operator==(const GridConfig&) const = default;
};

struct FamilyConfig {
  std::string family = "aW";
  std::map<std::string, double> params;  // family parameters, defaults materialized

  bool operator==(const FamilyConfig&) const = default;
};

struct IntegratorConfig {
  double tol = 2e-4;       // local error per unit time, relative to max|u|
  double dt_initial = 1e-4;
  double dt_min = 1e-12;
  double dt_max = 1e4;
  double t_max = 1e6;
  Nonlinearity nonlinearity = Nonlinearity::Focusing;

  bool operator==(const IntegratorConfig&) const = default;
};

struct SnapshotConfig {
  double t_first = 0.01;     // first snapshot after t = 0
  int per_decade = 16;       // geometric cadence
  int checkpoint_every = 0;  // keep a field every k-th snapshot; 0 = none

  bool operator==(const SnapshotConfig&) const = default;
};

struct VerdictConfig {
  double eps_dissip_rel = 1e-6;  // ||u||^2_H1 threshold relative to the initial value
  int kq_window = 5;             // consecutive decreasing K^q snapshots
  double blowup_factor = 10.0;
  double amp_cap = 1e8;
  double tol_threshold = 1e-5;  // relative band around E(W)

  bool operator==(const VerdictConfig&) const = default;
};

struct SweepPoint {
  int dimension = 0;
  FamilyConfig initial;
  GridConfig grid;  // materialized per point from its own dimension

  bool operator==(const SweepPoint&) const = default;
};

/// Everything a single run (or a sweep of runs sharing the same settings) needs.
struct RunConfig {
  int dimension = 5;
  GridConfig grid;
  FamilyConfig initial;
  IntegratorConfig integrator;
  SnapshotConfig snapshots;
  VerdictConfig verdict;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  std::vector<SweepPoint> sweep;  // only used by the sweep command

  bool operator==(const RunConfig&) const = default;
};

/// Registered initial-data families with their parameter defaults.
const std::map<std::string, std::map<std::string, double>>& registered_families();

/// Default grid for runs in dimension d (radius, nodes, stretch).
GridConfig default_run_grid(int d);

/// Parses the documented JSON tree. Throws ConfigError with the line or the
/// offending field name. Every default is materialized in the result.
RunConfig parse_config(std::string_view text);

/// The single-run config for one sweep point (dimension, grid and family
/// replaced, everything else shared).
RunConfig point_config(const RunConfig& cfg, const SweepPoint& point);

nlohmann::ordered_json to_json(const RunConfig& cfg);
std::string serialize_config(const RunConfig& cfg);

/// Content hash (FNV-1a 64, hex) of the canonical serialization.
std::string config_hash(const RunConfig& cfg);

}  // namespace critheat
