#include <doctest.h>

#include <string>

#include "critheat/config.hpp"
#include "critheat/errors.hpp"

using namespace critheat;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("minimal config gets every default") {
  const auto cfg = parse_config(R"({"dimension": 4, "initial": {"family": "aW", "params": {"a": 0.9}}})");
  CHECK(cfg.dimension == 4);
  CHECK(cfg.initial.family == "aW");
  CHECK(cfg.initial.params.at("a") == 0.9);
  CHECK(cfg.initial.params.at("lambda") == 1.0);
  CHECK(cfg.grid == default_run_grid(4));
  CHECK(cfg.grid.radius == 200.0);
  CHECK(cfg.integrator.tol == 2e-4);
  CHECK(cfg.integrator.dt_min == 1e-12);
  CHECK(cfg.integrator.nonlinearity == Nonlinearity::Focusing);
  CHECK(cfg.verdict.eps_dissip_rel == 1e-6);
  CHECK(cfg.verdict.kq_window == 5);
  CHECK(cfg.verdict.blowup_factor == 10.0);
  CHECK(cfg.verdict.amp_cap == 1e8);
  CHECK(cfg.verdict.tol_threshold == 1e-5);
  CHECK(cfg.output_dir == "out");
  CHECK(cfg.seed == 0);
  // the serialization lists the materialized defaults
  const auto text = serialize_config(cfg);
  CHECK(contains(text, "\"lambda\": 1.0"));
  CHECK(contains(text, "\"radius\": 200.0"));
  CHECK(contains(text, "\"amp_cap\": 100000000.0"));
}

TEST_CASE("validation errors name the field") {
  CHECK(contains(error_of(R"({"dimension": 2})"), "dimension"));
  const auto fam = error_of(R"({"initial": {"family": "soliton"}})");
  CHECK(contains(fam, "initial.family"));
  for (const char* name : {"aW", "aW_cutoff", "bump", "gaussian", "spectral_power"}) CHECK(contains(fam, name));
  CHECK(contains(error_of(R"({"integrator": {"tol": -1}})"), "integrator.tol"));
  CHECK(contains(error_of(R"({"integrator": {"tol": 0}})"), "integrator.tol"));
  CHECK(contains(error_of(R"({"verdict": {"amp_cap": 0}})"), "verdict.amp_cap"));
  CHECK(contains(error_of(R"({"grid": {"nodes": 8}})"), "grid.nodes"));
  CHECK(contains(error_of(R"({"grid": {"stretch": 1.5}})"), "grid.stretch"));
  CHECK(contains(error_of(R"({"integrator": {"nonlinearity": "cubic"}})"), "integrator.nonlinearity"));
  CHECK(contains(error_of(R"({"initial": {"family": "aW", "params": {"b": 1}}})"), "initial.params.b"));
  CHECK(contains(error_of(R"({"colour": "red"})"), "colour"));
  CHECK(contains(error_of(R"({"integrator": {"tolerance": 1e-3}})"), "integrator.tolerance"));
  CHECK(contains(error_of(R"({"dimension": "five"})"), "dimension"));
  CHECK(contains(error_of(R"({"sweep": [{"dimension": 1}]})"), "sweep[0].dimension"));
  CHECK(contains(error_of(R"({"integrator": {"dt_min": 1, "dt_max": 0.1}})"), "integrator.dt_min"));
  CHECK(contains(error_of(R"({"output_dir": ""})"), "output_dir"));
}

TEST_CASE("parse errors report the line") {
  const std::string text = "{\n  \"dimension\": 4,\n  \"seed\": ,\n}\n";
  const auto err = error_of(text);
  CHECK(contains(err, "line 3"));
  CHECK(contains(error_of("[1, 2]"), "line 1"));
}

TEST_CASE("round trip is stable") {
  const std::string text = R"({
    "dimension": 6,
    "grid": {"radius": 80, "nodes": 900, "stretch": 1.005},
    "initial": {"family": "bump", "params": {"amplitude": 0.25, "count": 2}},
    "integrator": {"tol": 1e-4, "t_max": 50, "nonlinearity": "defocusing"},
    "snapshots": {"t_first": 0.05, "per_decade": 8, "checkpoint_every": 3},
    "verdict": {"eps_dissip_rel": 1e-8, "kq_window": 4},
    "output_dir": "somewhere/else",
    "seed": 12345678901,
    "sweep": [{"dimension": 3, "initial": {"family": "aW"}},
              {"dimension": 5, "grid": {"radius": 100}, "initial": {"family": "gaussian", "params": {"width": 0.1}}}]
  })";
  const auto cfg = parse_config(text);
  const auto again = parse_config(serialize_config(cfg));
  CHECK(again == cfg);
  CHECK(serialize_config(again) == serialize_config(cfg));
  CHECK(config_hash(again) == config_hash(cfg));
  CHECK(config_hash(cfg).size() == 16);
  CHECK(cfg.integrator.nonlinearity == Nonlinearity::Defocusing);
  CHECK(cfg.seed == 12345678901ULL);

  REQUIRE(cfg.sweep.size() == 2);
  CHECK(cfg.sweep[0].grid == default_run_grid(3));
  CHECK(cfg.sweep[1].grid.radius == 100.0);
  CHECK(cfg.sweep[1].grid.stretch == default_run_grid(5).stretch);
  const auto point = point_config(cfg, cfg.sweep[1]);
  CHECK(point.dimension == 5);
  CHECK(point.initial.family == "gaussian");
  CHECK(point.initial.params.at("width") == 0.1);
  CHECK(point.integrator == cfg.integrator);
  CHECK(point.sweep.empty());

  auto changed = cfg;
  changed.seed += 1;
  CHECK(config_hash(changed) != config_hash(cfg));
}

TEST_CASE("registered families") {
  const auto& fams = registered_families();
  CHECK(fams.size() == 5);
  CHECK(fams.at("aW").at("a") == 0.9);
  CHECK(fams.at("aW_cutoff").at("a") == 1.3);
  CHECK(fams.at("gaussian").count("width") == 1);
  CHECK(to_string(Nonlinearity::None) == "none");
}
