#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bht/analysis.hpp"
#include "bht/protocol.hpp"

namespace bht {

/// Malformed config text; `line` is 1-based.
class ConfigParseError : public std::runtime_error {
 public:
  ConfigParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value that parses but violates a physical or structural precondition.
class ConfigValidationError : public std::invalid_argument {
 public:
  ConfigValidationError(std::string key, const std::string& what);
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class OutputFormat { json, csv };

/// Every run parameter as parsed from flat `key = value` text.
struct RunConfig {
  int L = 6;
  int N = 4;
  double J = 1.0;
  double U = 1.42;
  double h = 10.0;
  BarrierKind barrier = BarrierKind::vertical;
  std::vector<double> potential;  // barrier = custom only

  double tmax = 50.0;
  double dt = 0.05;

  double U_min = 0.0;
  double U_max = 5.0;
  double U_step = 0.02;
  double sweep_dt = 0.25;

  std::vector<double> coherent_n;  // empty: 2 bosons on each pre-barrier site
  double weight_tol = 1e-6;
  int n_max = 0;

  int top_k = 5;
  double report_threshold = 0.05;
  double window_threshold = 0.5;

  unsigned threads = 1;
  std::string out;
  std::optional<OutputFormat> format;

  QuenchSpec quench_spec() const;
  CoherentSpec coherent_spec() const;
  SweepSpec sweep_spec() const;
  OverlapOptions overlap_options() const;
};

/// Names accepted by parse_config / apply_setting.
const std::vector<std::string>& config_keys();

/// Sets one key from its text form. Throws ConfigValidationError for unknown keys or bad values.
void apply_setting(RunConfig& config, std::string_view key, std::string_view value);

/// Cross-field validation (odd L, list lengths, grid sanity). Throws ConfigValidationError naming the key.
void validate(const RunConfig& config);

/// Parses `key = value` lines with '#' comments over the documented defaults. Cross-field
/// validation runs unless `check` is false (callers that apply further overrides validate later).
RunConfig parse_config(std::string_view text, bool check = true);
RunConfig load_config(const std::filesystem::path& path);

/// %.12g rendering used by every writer.
std::string format_real(double x);

std::string sweep_csv(const SweepGrid& grid);
void write_sweep_csv(const SweepGrid& grid, const std::filesystem::path& path);
/// Reads back a sweep CSV written by write_sweep_csv.
SweepGrid read_sweep_csv(const std::filesystem::path& path);
std::string sweep_json(const SweepGrid& grid);

std::string trajectory_json(const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);
void write_trajectory_json(const Trajectory& traj, const std::filesystem::path& path);

std::string overlap_json(const OverlapReport& report);
void write_overlap_json(const OverlapReport& report, const std::filesystem::path& path);

std::string windows_json(const std::vector<DirectionalWindow>& windows, double threshold);
std::string windows_csv(const std::vector<DirectionalWindow>& windows);

/// Writes `content` to `path`, throwing std::runtime_error on failure.
void write_text(const std::filesystem::path& path, std::string_view content);

}  // namespace bht
