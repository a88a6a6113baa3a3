#pragma once

// Experiment orchestration behind the `qpa` command line: configuration
// documents, presets, and the iterate / mc / scan / verify runners that
// write plot-ready CSV and JSON files.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qpa/noise_model.hpp"
#include "qpa/recurrence.hpp"

namespace qpa {

enum class OutputFormat { Csv, Json };

struct ScanConfig {
  NoiseFamily family = NoiseFamily::OneSided;
  double lo = 0.88;
  double hi = 0.92;
  double bisect_tol = 1e-5;
  std::size_t grid_points = 0;  // > 0 adds a regime-vs-parameter table
  std::vector<double> werner_grid{0.75, 0.85, 0.95};
  RegimeTolerances regime{};
};

struct ExperimentConfig {
  std::string preset;  // empty when none
  NoiseModel noise = NoiseModel::identity();
  std::array<double, 4> initial_bell = werner_bell(0.85);
  FlagMode flag_mode = FlagMode::Fixed;
  NoisePlacement placement = NoisePlacement::BeforeRotation;
  std::size_t rounds = 10;
  double fixpoint_tol = 1e-12;
  std::uint64_t pairs = 1'000'000;
  std::uint64_t seed = 1;
  std::size_t chunks = 8;
  unsigned threads = 0;
  ScanConfig scan{};
  OutputFormat format = OutputFormat::Csv;

  /// Every field, defaults included.
  nlohmann::json to_json() const;
};

/// Named configurations. "fig1": uniform-residual noise 0.97, Werner 0.85,
/// fixed flags, seed 1, 10^7 pairs, 10 rounds. "thresholds": one-sided
/// depolarizing scan over [0.88, 0.92] with a 9-point regime table.
ExperimentConfig preset_config(std::string_view name);
std::vector<std::string> preset_names();

/// Applies a JSON configuration document on top of `base`. Unknown keys and
/// malformed values raise Error(Config) with a "source:line:column: " prefix.
ExperimentConfig parse_config(std::string_view text, std::string_view source_name, ExperimentConfig base = {});

struct RunOptions {
  std::filesystem::path out_dir = ".";
  bool deterministic = false;
};

/// Each runner writes its files under `out_dir` and returns a JSON summary.
nlohmann::json run_iterate(const ExperimentConfig& config, const RunOptions& options);
nlohmann::json run_mc(const ExperimentConfig& config, const RunOptions& options);
nlohmann::json run_scan(const ExperimentConfig& config, const RunOptions& options);
/// `tables_json` optionally overrides the label tables under test. Throws
/// Error(Verification) after writing the report when any check fails.
nlohmann::json run_verify(const std::optional<std::string>& tables_json, const RunOptions& options);

/// CSV column names shared by engine and Monte Carlo trajectory files.
std::vector<std::string> trajectory_columns(bool monte_carlo);

const char* version() noexcept;

}  // namespace qpa
