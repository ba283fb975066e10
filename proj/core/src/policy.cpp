#include "beamsw/policy.hpp"

#include <stdexcept>

#include "beamsw/dqn.hpp"

namespace beamsw {

std::vector<std::size_t> greedy_actions(const Eigen::MatrixXd& snr_table) {
  std::vector<std::size_t> actions(static_cast<std::size_t>(snr_table.rows()));
  for (Eigen::Index k = 0; k < snr_table.rows(); ++k) {
    actions[static_cast<std::size_t>(k)] = argmax_lowest(snr_table.row(k).transpose());
  }
  return actions;
}

std::vector<std::size_t> GreedyPolicy::act(Environment& env) {
  env.begin_step();
  return greedy_actions(env.oracle_snr_table());
}

UcbPolicy::UcbPolicy(std::size_t n_users, std::size_t n_beams, double exploration, std::size_t window)
    : bandits_(n_users, n_beams, exploration, window) {}

std::vector<std::size_t> UcbPolicy::act(Environment& env) {
  std::vector<std::size_t> actions(env.n_users());
  for (std::size_t k = 0; k < actions.size(); ++k) actions[k] = bandits_.select(k);
  return actions;
}

void UcbPolicy::observe(const Environment& /*env*/, std::span<const std::size_t> actions,
                        const StepResult& result) {
  for (std::size_t k = 0; k < actions.size(); ++k) {
    bandits_.update(k, actions[k], bandit_reward(result.per_user_snr_db[k]));
  }
}

DqnPolicy::DqnPolicy(std::string name, const DuelingNetwork& network)
    : name_(std::move(name)), network_(network) {}

std::vector<std::size_t> DqnPolicy::act(Environment& env) {
  if (network_.shape().n_actions != env.n_beams()) {
    throw std::invalid_argument("DqnPolicy: network action count does not match the codebook");
  }
  const std::vector<Observation> obs = env.observations();
  Rng unused(0);
  return dqn_select_actions(network_, obs, 0.0, unused);
}

void run_policy(Environment& env, Policy& policy, std::size_t steps) {
  for (std::size_t t = 0; t < steps; ++t) {
    const std::vector<std::size_t> actions = policy.act(env);
    const StepResult result = env.step(actions);
    policy.observe(env, actions, result);
  }
}

Evaluation evaluate(Environment& env, Policy& policy, std::size_t t_eval, std::uint64_t seed,
                    const std::string& config_hash) {
  MetricAccumulator acc(env.n_users());
  for (std::size_t t = 0; t < t_eval; ++t) {
    const std::vector<std::size_t> actions = policy.act(env);
    const StepResult result = env.step(actions);
    policy.observe(env, actions, result);
    acc.record_step(result);
  }
  RunSummary summary = summarize(acc, seed, policy.name(), config_hash);
  return {std::move(acc), std::move(summary)};
}

}  // namespace beamsw
