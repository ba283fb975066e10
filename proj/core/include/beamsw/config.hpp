#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "beamsw/dqn.hpp"
#include "beamsw/env.hpp"
#include "beamsw/metrics.hpp"

namespace beamsw {

inline const std::vector<std::string> kAllAgents = {"greedy", "mab", "vanilla-dqn", "proposed-dqn"};

struct ExperimentConfig {
  EnvConfig env;
  BlockageRegime blockage_regime = BlockageRegime::kDefault;
  DqnAgentConfig dqn;
  double ucb_c = 2.0;
  std::size_t ucb_window = 0;

  std::size_t t_train = 20000;
  std::size_t t_eval = 1000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string out_dir = "runs";
  std::size_t top_k = 0;
  std::string top_k_metric = "stability_score";
  std::vector<std::string> agents = kAllAgents;

  /// Sets env.blockage from the regime.
  void apply_blockage_regime(BlockageRegime regime);
};

/// Raised for malformed or invalid configuration; `field()` names the
/// offending key as "section.key".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Preset { kPaper, kDesk };

Preset parse_preset(const std::string& name);
ExperimentConfig make_preset(Preset preset);

/// Overlays the text (YAML with sections scenario/agent/reward/run) on
/// `base`. Unknown sections or keys are rejected. The result is validated.
ExperimentConfig parse_config_string(const std::string& text, const ExperimentConfig& base = make_preset(Preset::kPaper));
ExperimentConfig parse_config(const std::filesystem::path& path, const ExperimentConfig& base = make_preset(Preset::kPaper));

/// Full YAML rendering; parses back to an identical config.
std::string serialize_config(const ExperimentConfig& config);

/// Throws ConfigError naming the first invalid field.
void validate_config(const ExperimentConfig& config);

/// Sorted "section.key=value" lines over every field that changes what a run
/// computes (output directory, seed list and agent list are excluded).
std::string canonical_config(const ExperimentConfig& config);
/// 16 hex digits of FNV-1a over canonical_config().
std::string config_hash(const ExperimentConfig& config);

std::string to_string(BlockageRegime regime);
BlockageRegime parse_blockage_regime(const std::string& name);
std::string to_string(ChannelMode mode);
ChannelMode parse_channel_mode(const std::string& name);

/// "1,2,3" -> {1,2,3}.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
/// "greedy,mab" -> validated agent names.
std::vector<std::string> parse_agent_list(const std::string& text);

}  // namespace beamsw
