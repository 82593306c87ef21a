#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "critheat/config.hpp"
#include "critheat/evolve.hpp"
#include "critheat/experiments.hpp"

namespace critheat {

inline constexpr const char* kVersion = "0.1.0";

/// %.17g, so every double survives a text round trip.
std::string format_double(double x);

/// RFC-4180 CSV with a mandatory header; fields containing separators,
/// quotes or newlines are quoted.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
  void row(const std::vector<std::string>& fields);
  void close();
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t width_;
};

/// Creates `dir`. An existing non-empty directory is an IoError unless
/// `overwrite`, in which case its contents are removed first.
void prepare_output_dir(const std::filesystem::path& dir, bool overwrite);

/// Long-form rows (run, t, quantity, value) for every snapshot scalar.
void write_trajectory_csv(CsvWriter& csv, const std::string& run, const Trajectory& traj);
std::vector<std::string> trajectory_header();

std::vector<std::string> sweep_header();
void write_sweep_row(CsvWriter& csv, const SweepRow& row);

/// "a=0.9;lambda=1" in key order.
std::string format_params(const std::map<std::string, double>& params);

nlohmann::ordered_json verdict_json(const Verdict& v);

/// Manifest skeleton: command, tool version, config hash and config, grid summary.
nlohmann::ordered_json manifest_base(const std::string& command, const RunConfig& cfg);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

}  // namespace critheat
