#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "beamsw/env.hpp"

namespace beamsw {

inline constexpr double kReliabilityThresholdDb = 6.0;
inline constexpr double kAccuracyThresholdDb = 14.0;

struct StepRecord {
  std::vector<double> snr_db;
  std::vector<double> throughput_mbps;
  std::vector<bool> blocked;
  std::size_t n_switches = 0;
};

/// Append-only per-step record of one evaluation run.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(std::size_t n_users, double reliability_threshold_db = kReliabilityThresholdDb,
                             double accuracy_threshold_db = kAccuracyThresholdDb);

  void record_step(const StepResult& step);

  std::size_t n_users() const { return n_users_; }
  std::size_t n_steps() const { return records_.size(); }
  const std::vector<StepRecord>& records() const { return records_; }
  double reliability_threshold_db() const { return reliability_threshold_db_; }
  double accuracy_threshold_db() const { return accuracy_threshold_db_; }
  std::size_t total_switches() const { return total_switches_; }

 private:
  std::size_t n_users_;
  double reliability_threshold_db_;
  double accuracy_threshold_db_;
  std::vector<StepRecord> records_;
  std::size_t total_switches_ = 0;
};

/// Fraction of (user, step) pairs with SNR >= 6 dB.
double reliability(const MetricAccumulator& acc);
/// Fraction of (user, step) pairs with SNR >= 14 dB.
double accuracy(const MetricAccumulator& acc);
/// Mean over steps t >= 2 of n_switches(t) / K + 0.1 mean_k |SNR_k(t) - SNR_k(t-1)|.
double stability_score(const MetricAccumulator& acc);
/// Mean per user of downward crossings of the 6 dB service threshold.
double service_interruptions(const MetricAccumulator& acc);
double mean_snr_db(const MetricAccumulator& acc);
double mean_throughput_mbps(const MetricAccumulator& acc);
double blocked_fraction(const MetricAccumulator& acc);

struct RunSummary {
  double mean_snr_db = 0.0;
  double mean_throughput_mbps = 0.0;
  double reliability_fraction = 0.0;
  double accuracy_fraction = 0.0;
  /// Same quantity as reliability_fraction.
  double coverage_fraction = 0.0;
  std::size_t total_switches = 0;
  double switch_rate_per_user_step = 0.0;
  double stability_score = 0.0;
  double interruptions_per_user = 0.0;
  double blocked_fraction = 0.0;
  std::size_t n_users = 0;
  std::size_t n_steps = 0;
  std::uint64_t seed = 0;
  std::string agent_name;
  std::string config_hash;

  bool operator==(const RunSummary&) const = default;
};

RunSummary summarize(const MetricAccumulator& acc, std::uint64_t seed, const std::string& agent_name,
                     const std::string& config_hash);

std::string summary_to_json(const RunSummary& summary);
RunSummary summary_from_json(const std::string& text);

/// CSV: step,mean_snr_db,mean_throughput_mbps,n_switches,reliability_so_far,blocked_fraction.
void write_step_csv(const std::filesystem::path& path, const MetricAccumulator& acc);
void write_summary_json(const std::filesystem::path& path, const RunSummary& summary);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

/// Sample mean and (n - 1) standard deviation; stddev is 0 for one value.
MeanStd mean_std(const std::vector<double>& values);

struct ComparisonRow {
  std::string label;
  std::size_t n_runs = 0;
  MeanStd stability_score;
  MeanStd mean_snr_db;
  MeanStd coverage_fraction;
  MeanStd interruptions_per_user;
  MeanStd mean_throughput_mbps;
  MeanStd accuracy_fraction;
  MeanStd switch_rate_per_user_step;
};

/// One row per agent (in first-appearance order). When top_k is in
/// [1, runs) an extra "<agent> (top-k)" row keeps the k runs with the lowest
/// value of `rank_metric`, for the agents listed in `top_k_agents`.
std::vector<ComparisonRow> compare_runs(const std::vector<RunSummary>& runs, std::size_t top_k = 0,
                                        const std::string& rank_metric = "stability_score",
                                        const std::vector<std::string>& top_k_agents = {"proposed-dqn"});

/// Reads a named metric from a summary (e.g. "stability_score").
double summary_metric(const RunSummary& summary, const std::string& name);

void write_comparison_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows);
std::string comparison_markdown(const std::vector<ComparisonRow>& rows);

}  // namespace beamsw
