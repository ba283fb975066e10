#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "beamsw/env.hpp"
#include "beamsw/neural.hpp"
#include "beamsw/replay.hpp"
#include "beamsw/rng.hpp"

namespace beamsw {

enum class RewardVariant {
  /// f_snr minus the SNR-fluctuation and shared switch penalties.
  kStabilityAware,
  /// f_snr only.
  kVanilla,
};

struct DqnAgentConfig {
  double gamma = 0.99;
  std::size_t batch_size = 512;
  std::size_t target_sync_period = 100;
  /// Gradient steps per environment step.
  std::size_t updates_per_step = 1;
  double epsilon_start = 0.7;
  double epsilon_floor = 0.05;
  double epsilon_decay = 0.9997;
  RewardVariant reward_variant = RewardVariant::kStabilityAware;
  /// n_actions is overwritten with the codebook size when the agent is built.
  NetworkShape network;
  AdamConfig adam;
  std::size_t buffer_capacity = 100000;
  double per_alpha = 0.6;
  double per_beta_start = 0.4;
  double per_beta_end = 1.0;
  double priority_epsilon = 0.01;

  void validate() const;
};

/// Reward stored in a transition for the given variant.
double transition_reward(RewardVariant variant, const RewardParams& params, const StepResult& step,
                         std::size_t user);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Per user: a uniform random beam with probability epsilon, otherwise the
/// eval-mode argmax of Q.
std::vector<std::size_t> dqn_select_actions(const DuelingNetwork& net,
                                            std::span<const Observation> observations, double epsilon,
                                            Rng& rng);

/// y_j = r_j + gamma * Q_target(s'_j, argmax_a Q_online(s'_j, a)). Both
/// networks are evaluated in eval mode.
std::vector<double> double_dqn_targets(const DuelingNetwork& online, const DuelingNetwork& target,
                                       std::span<const double> rewards, const Matrix& next_states,
                                       double gamma);

/// Shared-parameter Dueling Double DQN with prioritized replay. One network
/// scores every user's observation; every user's transition goes into the
/// same buffer.
class DqnAgent {
 public:
  DqnAgent(DqnAgentConfig config, std::size_t n_actions, std::uint64_t seed);

  /// Epsilon-greedy actions at the current exploration rate.
  std::vector<std::size_t> act(std::span<const Observation> observations);
  /// Pure exploitation (epsilon = 0).
  std::vector<std::size_t> act_greedy(std::span<const Observation> observations) const;

  void remember(std::span<const Observation> states, std::span<const std::size_t> actions,
                const StepResult& step, std::span<const Observation> next_states,
                const RewardParams& params);

  /// One prioritized gradient step when the buffer holds at least a batch.
  /// Returns the weighted loss, or nothing when gated by warm-up.
  std::optional<double> learn(double beta);

  void decay_epsilon();

  double epsilon() const { return epsilon_; }
  std::size_t gradient_steps() const { return gradient_steps_; }
  const DqnAgentConfig& config() const { return config_; }
  const DuelingNetwork& online() const { return online_; }
  const DuelingNetwork& target() const { return target_; }
  DuelingNetwork& online() { return online_; }
  const AdamState& optimizer() const { return adam_; }
  const PriorityBuffer& buffer() const { return buffer_; }

 private:
  DqnAgentConfig config_;
  Rng init_rng_;
  DuelingNetwork online_;
  DuelingNetwork target_;
  AdamState adam_;
  PriorityBuffer buffer_;
  Rng explore_rng_;
  Rng sample_rng_;
  Rng dropout_rng_;
  double epsilon_;
  std::size_t gradient_steps_ = 0;
};

struct TrainingLogRow {
  std::size_t step = 0;
  double epsilon = 0.0;
  std::optional<double> loss;
  double mean_reward = 0.0;
  std::size_t buffer_size = 0;
  std::size_t n_switches = 0;
  std::size_t evictions = 0;
};

struct TrainResult {
  DqnAgent agent;
  std::vector<TrainingLogRow> log;
};

/// Online training: observe, act epsilon-greedily for all users, step the
/// environment, store K transitions, take one prioritized Double-DQN step,
/// sync the target every `target_sync_period` gradient steps and decay
/// epsilon once per environment step. Throws on a non-finite loss.
TrainResult train_loop(Environment& env, const DqnAgentConfig& config, std::size_t t_train,
                       std::uint64_t seed);

/// CSV: step,epsilon,loss,mean_reward,buffer_size,n_switches,evictions.
void write_training_log(const std::filesystem::path& path, const std::vector<TrainingLogRow>& log);

}  // namespace beamsw
