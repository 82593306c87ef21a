#include "critheat/output.hpp"

#include <cstdio>

#include "critheat/errors.hpp"
#include "critheat/initial_data.hpp"

namespace critheat {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

CsvWriter::CsvWriter(const fs::path& path, std::vector<std::string> header)
    : path_(path), out_(path, std::ios::binary), width_(header.size()) {
  if (!out_) throw IoError("cannot create " + path.string());
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_)
    throw InvalidArgument("CsvWriter: row has " + std::to_string(fields.size()) + " fields, header " +
                          std::to_string(width_));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << quote(fields[i]);
  }
  out_ << "\r\n";
  if (!out_) throw IoError("write failed on " + path_.string());
}

void CsvWriter::close() {
  out_.close();
  if (out_.fail()) throw IoError("close failed on " + path_.string());
}

void prepare_output_dir(const fs::path& dir, bool overwrite) {
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) throw IoError(dir.string() + " exists and is not a directory");
    if (!fs::is_empty(dir, ec)) {
      if (!overwrite)
        throw IoError("output directory " + dir.string() + " already exists (use --overwrite)");
      for (const auto& entry : fs::directory_iterator(dir)) fs::remove_all(entry.path(), ec);
      if (ec) throw IoError("cannot clear " + dir.string() + ": " + ec.message());
    }
  }
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::vector<std::string> trajectory_header() { return {"run", "t", "quantity", "value"}; }

void write_trajectory_csv(CsvWriter& csv, const std::string& run, const Trajectory& traj) {
  for (const auto& s : traj.snapshots) {
    const auto t = format_double(s.t);
    auto put = [&](const char* q, double v) { csv.row({run, t, q, format_double(v)}); };
    put("h1_sq", s.report.h1_sq);
    put("l2star_pow", s.report.l2star_pow);
    put("energy", s.report.energy);
    put("nehari", s.report.nehari);
    if (s.report.l2_sq) put("l2_sq", *s.report.l2_sq);
    put("dt", s.dt);
    put("kq", s.kq);
    put("max_abs", s.max_abs);
    put("min_value", s.min_value);
    put("dissipation", s.dissipation);
  }
  for (const auto& e : traj.events)
    csv.row({run, format_double(e.t), "event", std::string(to_string(e.kind))});
}

std::string format_params(const std::map<std::string, double>& params) {
  std::string s;
  for (const auto& [k, v] : params) s += (s.empty() ? "" : ";") + k + "=" + format_double(v);
  return s;
}

std::vector<std::string> sweep_header() {
  return {"family", "params", "d", "energy_ratio", "gradient_ratio", "l2_finite", "set", "margin",
          "expected", "hypotheses_hold", "verdict", "reason", "t_end", "final_h1_sq",
          "blowup_lo", "blowup_hi", "nehari_negative_throughout", "consistent_with_theorem"};
}

void write_sweep_row(CsvWriter& csv, const SweepRow& r) {
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  csv.row({r.family, format_params(r.params), std::to_string(r.d), format_double(r.energy_ratio),
           format_double(r.gradient_ratio), b(r.l2_finite), std::string(to_string(r.membership.verdict)),
           format_double(r.membership.margin), std::string(to_string(r.expected)),
           b(r.hypotheses_hold), std::string(to_string(r.verdict.kind)), r.verdict.reason,
           format_double(r.verdict.t_end), format_double(r.verdict.final_h1_sq),
           format_double(r.verdict.blowup_lo), format_double(r.verdict.blowup_hi),
           b(r.verdict.nehari_negative_throughout), b(r.consistent_with_theorem)});
}

nlohmann::ordered_json verdict_json(const Verdict& v) {
  nlohmann::ordered_json j;
  j["kind"] = std::string(to_string(v.kind));
  j["t_end"] = v.t_end;
  j["reason"] = v.reason;
  if (v.kind == VerdictKind::Dissipative) j["final_h1_sq"] = v.final_h1_sq;
  if (v.kind == VerdictKind::Blowup) j["blowup_bracket"] = {v.blowup_lo, v.blowup_hi};
  j["nehari_negative_throughout"] = v.nehari_negative_throughout;
  return j;
}

nlohmann::ordered_json manifest_base(const std::string& command, const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["config_hash"] = config_hash(cfg);
  const auto grid = make_run_grid(cfg);
  j["grid"] = {{"dimension", grid->dim()},
               {"radius", grid->radius()},
               {"nodes", grid->size()},
               {"stretch", grid->stretch()},
               {"h_min", grid->spacing(0)},
               {"h_max", grid->spacing(grid->size() - 2)}};
  j["tolerances"] = {{"integrator_tol", cfg.integrator.tol},
                     {"dt_min", cfg.integrator.dt_min},
                     {"tol_threshold", cfg.verdict.tol_threshold},
                     {"eps_dissip_rel", cfg.verdict.eps_dissip_rel}};
  j["config"] = to_json(cfg);
  return j;
}

void write_json(const fs::path& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot create " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace critheat
