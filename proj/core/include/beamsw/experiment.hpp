#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "beamsw/config.hpp"
#include "beamsw/metrics.hpp"

namespace beamsw {

inline constexpr int kArtifactFormatVersion = 1;

struct RunRecord {
  std::string agent;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  RunSummary summary;
  /// Paths relative to the experiment output directory.
  std::vector<std::string> files;
  double wall_seconds = 0.0;
};

struct RunManifest {
  std::string config_yaml;
  std::string config_hash;
  std::string started_utc;
  std::string finished_utc;
  int format_version = kArtifactFormatVersion;
  std::vector<RunRecord> runs;
  /// Experiment-level files (comparison table, config snapshot).
  std::vector<std::string> files;
};

struct ExperimentOptions {
  /// Worker threads for independent (seed, agent) runs; 0 reads the
  /// BEAMSW_WORKERS environment variable (default 1).
  std::size_t workers = 0;
  /// Progress lines; null for silence.
  std::ostream* log = nullptr;
  /// Skip writing files entirely (summaries are still returned).
  bool write_files = true;
};

struct ExperimentResult {
  std::vector<RunSummary> summaries;
  std::vector<ComparisonRow> comparison;
  RunManifest manifest;
  bool all_ok() const;
};

/// Seed used by each stream of one run. The environment stream depends on
/// the seed only, so every agent faces the same exogenous trajectory,
/// blockage and fading sequence; agent streams also hash the agent name.
std::uint64_t environment_seed(std::uint64_t seed);
std::uint64_t agent_seed(std::uint64_t seed, const std::string& agent);

/// Runs one (agent, seed) pair: train (learning agents), then evaluate for
/// t_eval steps on the continuation of the same environment. Writes into
/// `run_dir` when non-empty.
RunRecord run_single(const ExperimentConfig& config, const std::string& agent, std::uint64_t seed,
                     const std::filesystem::path& run_dir, const std::string& hash);

/// Every seed x agent, then the cross-agent comparison table. Individual run
/// failures are recorded in the manifest without aborting siblings.
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

struct SweepResult {
  ExperimentResult default_regime;
  ExperimentResult high_regime;
  std::string report_markdown;
};

/// run_experiment under both blockage regimes, in <out>/default and <out>/high.
SweepResult sweep_blockage(const ExperimentConfig& config, const ExperimentOptions& options = {});

struct LatencyStats {
  std::size_t n_repeats = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

/// Wall-clock latency of one eval-mode, epsilon = 0 decision for all K users
/// with a randomly initialized network (or `network` when given).
LatencyStats benchmark_inference(const ExperimentConfig& config, std::size_t n_repeats,
                                 const DuelingNetwork* network = nullptr);

/// Evaluates a saved network: fast-forwards the seed's environment by
/// t_train steps, then evaluates t_eval steps.
RunSummary evaluate_checkpoint(const ExperimentConfig& config, const std::filesystem::path& checkpoint,
                               std::uint64_t seed, const std::string& agent_name = "checkpoint");

std::string manifest_to_json(const RunManifest& manifest);

}  // namespace beamsw
