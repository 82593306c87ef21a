#include "critheat/config.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "critheat/errors.hpp"

namespace critheat {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Nonlinearity n) {
  switch (n) {
    case Nonlinearity::Focusing: return "focusing";
    case Nonlinearity::Defocusing: return "defocusing";
    case Nonlinearity::None: return "none";
  }
  return "?";
}

const std::map<std::string, std::map<std::string, double>>& registered_families() {
  static const std::map<std::string, std::map<std::string, double>> families = {
      {"aW", {{"a", 0.9}, {"lambda", 1.0}}},
      {"aW_cutoff", {{"a", 1.3}, {"lambda", 1.0}, {"rho_c", 0.0}}},
      {"gaussian", {{"amplitude", 0.1}, {"width", 1.0}}},
      {"spectral_power", {{"amplitude", 1.0}, {"k", 0.0}, {"b", 1.0}}},
      {"bump", {{"amplitude", 0.5}, {"count", 3.0}, {"width", 1.0}, {"spread", 4.0}}},
  };
  return families;
}

GridConfig default_run_grid(int d) {
  if (d < 3) throw ConfigError("dimension: must be >= 3, got " + std::to_string(d));
  GridConfig g;
  switch (d) {
    case 3:
    case 4: g.radius = 200.0; break;
    case 5: g.radius = 400.0; break;  // keeps the L^2 tail of aW below 1%
    case 6: g.radius = 100.0; break;
    default: g.radius = 60.0; break;
  }
  g.stretch = 1.01;
  const double h0 = 5e-3;
  const double steps = std::ceil(std::log1p(g.radius * (g.stretch - 1.0) / h0) / std::log(g.stretch));
  g.nodes = static_cast<std::size_t>(steps) + 1;
  return g;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> known) {
  if (!obj.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : obj.items())
    if (!known.count(k)) fail(where.empty() ? k : where + "." + k, "unknown key");
}

template <class T>
void read(const json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const std::string field = where.empty() ? key : where + "." + key;
  const auto& v = obj.at(key);
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(field, "expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(field, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.get<long long>() < 0 && !v.is_number_unsigned()) fail(field, "must be nonnegative");
    }
    out = v.get<T>();
  } else {
    if (!v.is_number()) fail(field, "expected a number");
    out = v.get<T>();
  }
}

void require_positive(double x, const std::string& field) {
  if (!(x > 0.0) || !std::isfinite(x)) fail(field, "must be positive and finite");
}

FamilyConfig parse_family(const json& obj, const std::string& where) {
  reject_unknown(obj, where, {"family", "params"});
  FamilyConfig f;
  read(obj, where, "family", f.family);
  const auto& fams = registered_families();
  auto it = fams.find(f.family);
  if (it == fams.end()) {
    std::string known;
    for (const auto& [k, v] : fams) known += (known.empty() ? "" : ", ") + k;
    fail(where + ".family", "unknown family '" + f.family + "' (registered: " + known + ")");
  }
  f.params = it->second;
  if (obj.contains("params")) {
    const auto& p = obj.at("params");
    if (!p.is_object()) fail(where + ".params", "expected an object");
    for (const auto& [k, v] : p.items()) {
      if (!f.params.count(k))
        fail(where + ".params." + k, "not a parameter of family " + f.family);
      if (!v.is_number()) fail(where + ".params." + k, "expected a number");
      f.params[k] = v.get<double>();
    }
  }
  return f;
}

GridConfig parse_grid(const json& root, const std::string& where, int d) {
  GridConfig g;
  if (root.contains("grid")) {
    const auto& obj = root.at("grid");
    reject_unknown(obj, where + "grid", {"radius", "nodes", "stretch"});
    read(obj, where + "grid", "radius", g.radius);
    read(obj, where + "grid", "nodes", g.nodes);
    read(obj, where + "grid", "stretch", g.stretch);
  }
  const auto def = default_run_grid(d);
  if (g.radius == 0.0) g.radius = def.radius;
  if (g.nodes == 0) g.nodes = def.nodes;
  if (g.stretch == 0.0) g.stretch = def.stretch;
  require_positive(g.radius, where + "grid.radius");
  if (g.nodes < 16) fail(where + "grid.nodes", "must be >= 16");
  if (!(g.stretch >= 1.0 && g.stretch <= 1.2)) fail(where + "grid.stretch", "must lie in [1, 1.2]");
  return g;
}

int parse_dimension(const json& obj, const std::string& where, int fallback) {
  int d = fallback;
  read(obj, where, "dimension", d);
  if (d < 3) fail(where.empty() ? "dimension" : where + ".dimension", "must be >= 3, got " + std::to_string(d));
  return d;
}

Nonlinearity parse_nonlinearity(const std::string& s) {
  if (s == "focusing") return Nonlinearity::Focusing;
  if (s == "defocusing") return Nonlinearity::Defocusing;
  if (s == "none") return Nonlinearity::None;
  fail("integrator.nonlinearity", "expected focusing, defocusing or none, got '" + s + "'");
}

std::size_t line_of(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("parse error at line " + std::to_string(line_of(text, e.byte)) + ": " +
                      e.what());
  }
  if (!root.is_object()) throw ConfigError("parse error at line 1: top level must be an object");
  reject_unknown(root, "", {"dimension", "grid", "initial", "integrator", "snapshots", "verdict",
                            "output_dir", "seed", "sweep"});

  RunConfig cfg;
  cfg.dimension = parse_dimension(root, "", cfg.dimension);
  cfg.grid = parse_grid(root, "", cfg.dimension);
  cfg.initial = parse_family(root.value("initial", json::object()), "initial");

  if (root.contains("integrator")) {
    const auto& o = root.at("integrator");
    reject_unknown(o, "integrator", {"tol", "dt_initial", "dt_min", "dt_max", "t_max", "nonlinearity"});
    read(o, "integrator", "tol", cfg.integrator.tol);
    read(o, "integrator", "dt_initial", cfg.integrator.dt_initial);
    read(o, "integrator", "dt_min", cfg.integrator.dt_min);
    read(o, "integrator", "dt_max", cfg.integrator.dt_max);
    read(o, "integrator", "t_max", cfg.integrator.t_max);
    std::string nl(to_string(cfg.integrator.nonlinearity));
    read(o, "integrator", "nonlinearity", nl);
    cfg.integrator.nonlinearity = parse_nonlinearity(nl);
  }
  require_positive(cfg.integrator.tol, "integrator.tol");
  require_positive(cfg.integrator.dt_initial, "integrator.dt_initial");
  require_positive(cfg.integrator.dt_min, "integrator.dt_min");
  require_positive(cfg.integrator.dt_max, "integrator.dt_max");
  require_positive(cfg.integrator.t_max, "integrator.t_max");
  if (cfg.integrator.dt_min > cfg.integrator.dt_max)
    fail("integrator.dt_min", "must not exceed dt_max");

  if (root.contains("snapshots")) {
    const auto& o = root.at("snapshots");
    reject_unknown(o, "snapshots", {"t_first", "per_decade", "checkpoint_every"});
    read(o, "snapshots", "t_first", cfg.snapshots.t_first);
    read(o, "snapshots", "per_decade", cfg.snapshots.per_decade);
    read(o, "snapshots", "checkpoint_every", cfg.snapshots.checkpoint_every);
  }
  require_positive(cfg.snapshots.t_first, "snapshots.t_first");
  if (cfg.snapshots.per_decade < 1) fail("snapshots.per_decade", "must be >= 1");
  if (cfg.snapshots.checkpoint_every < 0) fail("snapshots.checkpoint_every", "must be >= 0");

  if (root.contains("verdict")) {
    const auto& o = root.at("verdict");
    reject_unknown(o, "verdict", {"eps_dissip_rel", "kq_window", "blowup_factor", "amp_cap", "tol_threshold"});
    read(o, "verdict", "eps_dissip_rel", cfg.verdict.eps_dissip_rel);
    read(o, "verdict", "kq_window", cfg.verdict.kq_window);
    read(o, "verdict", "blowup_factor", cfg.verdict.blowup_factor);
    read(o, "verdict", "amp_cap", cfg.verdict.amp_cap);
    read(o, "verdict", "tol_threshold", cfg.verdict.tol_threshold);
  }
  require_positive(cfg.verdict.eps_dissip_rel, "verdict.eps_dissip_rel");
  if (cfg.verdict.kq_window < 1) fail("verdict.kq_window", "must be >= 1");
  require_positive(cfg.verdict.blowup_factor, "verdict.blowup_factor");
  require_positive(cfg.verdict.amp_cap, "verdict.amp_cap");
  require_positive(cfg.verdict.tol_threshold, "verdict.tol_threshold");

  read(root, "", "output_dir", cfg.output_dir);
  if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");
  read(root, "", "seed", cfg.seed);

  if (root.contains("sweep")) {
    const auto& arr = root.at("sweep");
    if (!arr.is_array()) fail("sweep", "expected an array");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "sweep[" + std::to_string(i) + "]";
      const auto& o = arr.at(i);
      reject_unknown(o, where, {"dimension", "initial", "grid"});
      SweepPoint p;
      p.dimension = parse_dimension(o, where, cfg.dimension);
      p.grid = parse_grid(o, where + ".", p.dimension);
      if (!o.contains("initial")) fail(where + ".initial", "missing");
      p.initial = parse_family(o.at("initial"), where + ".initial");
      cfg.sweep.push_back(std::move(p));
    }
  }
  return cfg;
}

RunConfig point_config(const RunConfig& cfg, const SweepPoint& point) {
  RunConfig out = cfg;
  out.dimension = point.dimension;
  out.grid = point.grid;
  out.initial = point.initial;
  out.sweep.clear();
  return out;
}

namespace {

ordered_json grid_json(const GridConfig& g) {
  return {{"radius", g.radius}, {"nodes", g.nodes}, {"stretch", g.stretch}};
}

ordered_json family_json(const FamilyConfig& f) {
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : f.params) params[k] = v;
  return {{"family", f.family}, {"params", params}};
}

}  // namespace

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  j["dimension"] = cfg.dimension;
  j["grid"] = grid_json(cfg.grid);
  j["initial"] = family_json(cfg.initial);
  j["integrator"] = {{"tol", cfg.integrator.tol},
                     {"dt_initial", cfg.integrator.dt_initial},
                     {"dt_min", cfg.integrator.dt_min},
                     {"dt_max", cfg.integrator.dt_max},
                     {"t_max", cfg.integrator.t_max},
                     {"nonlinearity", std::string(to_string(cfg.integrator.nonlinearity))}};
  j["snapshots"] = {{"t_first", cfg.snapshots.t_first},
                    {"per_decade", cfg.snapshots.per_decade},
                    {"checkpoint_every", cfg.snapshots.checkpoint_every}};
  j["verdict"] = {{"eps_dissip_rel", cfg.verdict.eps_dissip_rel},
                  {"kq_window", cfg.verdict.kq_window},
                  {"blowup_factor", cfg.verdict.blowup_factor},
                  {"amp_cap", cfg.verdict.amp_cap},
                  {"tol_threshold", cfg.verdict.tol_threshold}};
  j["output_dir"] = cfg.output_dir;
  j["seed"] = cfg.seed;
  ordered_json sweep = ordered_json::array();
  for (const auto& p : cfg.sweep)
    sweep.push_back({{"dimension", p.dimension}, {"grid", grid_json(p.grid)}, {"initial", family_json(p.initial)}});
  j["sweep"] = sweep;
  return j;
}

std::string serialize_config(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace critheat
