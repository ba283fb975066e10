#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "beamsw/env.hpp"
#include "beamsw/metrics.hpp"
#include "beamsw/neural.hpp"
#include "beamsw/ucb.hpp"

namespace beamsw {

/// Per-row argmax of a K x N_b SNR table, ties to the lowest beam index.
std::vector<std::size_t> greedy_actions(const Eigen::MatrixXd& snr_table);

/// A beam-selection policy driven step by step against an Environment.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  /// Chooses one beam per user for the upcoming step.
  virtual std::vector<std::size_t> act(Environment& env) = 0;
  /// Feedback after the step has been executed.
  virtual void observe(const Environment& /*env*/, std::span<const std::size_t> /*actions*/,
                       const StepResult& /*result*/) {}
};

/// Full-CSI oracle: the best beam of the realization the step will face.
class GreedyPolicy final : public Policy {
 public:
  std::string name() const override { return "greedy"; }
  std::vector<std::size_t> act(Environment& env) override;
};

/// Per-user UCB1 on the bounded SNR reward. Learns online on every step it
/// observes, during evaluation included.
class UcbPolicy final : public Policy {
 public:
  UcbPolicy(std::size_t n_users, std::size_t n_beams, double exploration, std::size_t window = 0);
  std::string name() const override { return "mab"; }
  std::vector<std::size_t> act(Environment& env) override;
  void observe(const Environment& env, std::span<const std::size_t> actions, const StepResult& result) override;
  const UcbBandits& bandits() const { return bandits_; }

 private:
  UcbBandits bandits_;
};

/// Exploitation-only wrapper around a trained Q-network.
class DqnPolicy final : public Policy {
 public:
  DqnPolicy(std::string name, const DuelingNetwork& network);
  std::string name() const override { return name_; }
  std::vector<std::size_t> act(Environment& env) override;
  const DuelingNetwork& network() const { return network_; }

 private:
  std::string name_;
  DuelingNetwork network_;
};

/// Drives `policy` for `steps` steps without recording metrics.
void run_policy(Environment& env, Policy& policy, std::size_t steps);

struct Evaluation {
  MetricAccumulator metrics;
  RunSummary summary;
};

/// Runs `t_eval` steps of `policy` and summarizes them. DQN policies act at
/// epsilon = 0 and never update their network.
Evaluation evaluate(Environment& env, Policy& policy, std::size_t t_eval, std::uint64_t seed,
                    const std::string& config_hash = "");

}  // namespace beamsw
