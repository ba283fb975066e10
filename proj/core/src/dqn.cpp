#include "beamsw/dqn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "text.hpp"

namespace beamsw {

void DqnAgentConfig::validate() const {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("agent.gamma must be in (0, 1]");
  if (batch_size < 2) throw std::invalid_argument("agent.batch_size must be >= 2");
  if (target_sync_period == 0) throw std::invalid_argument("agent.target_sync_period must be >= 1");
  if (updates_per_step == 0) throw std::invalid_argument("agent.updates_per_step must be >= 1");
  if (!(epsilon_floor >= 0.0 && epsilon_floor <= epsilon_start && epsilon_start <= 1.0)) {
    throw std::invalid_argument("agent epsilon must satisfy 0 <= epsilon_floor <= epsilon_start <= 1");
  }
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) {
    throw std::invalid_argument("agent.epsilon_decay must be in (0, 1]");
  }
  if (buffer_capacity < batch_size) throw std::invalid_argument("agent.buffer_capacity must be >= batch_size");
  if (!(per_alpha >= 0.0)) throw std::invalid_argument("agent.per_alpha must be >= 0");
  if (!(per_beta_start >= 0.0 && per_beta_end >= 0.0)) throw std::invalid_argument("agent.per_beta must be >= 0");
  if (!(priority_epsilon > 0.0)) throw std::invalid_argument("agent.priority_epsilon must be > 0");
  if (!(adam.learning_rate > 0.0)) throw std::invalid_argument("agent.learning_rate must be > 0");
  network.validate();
}

double transition_reward(RewardVariant variant, const RewardParams& params, const StepResult& step,
                         std::size_t user) {
  const double snr = step.per_user_snr_db.at(user);
  if (variant == RewardVariant::kVanilla) return f_snr(snr, params);
  return compute_reward(snr, step.per_user_prev_snr_db.at(user), step.n_switches,
                        step.per_user_snr_db.size(), params);
}

std::size_t argmax_lowest(const Eigen::Ref<const Eigen::VectorXd>& values) {
  std::size_t best = 0;
  for (Eigen::Index i = 1; i < values.size(); ++i) {
    if (values(i) > values(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
  }
  return best;
}

std::vector<std::size_t> dqn_select_actions(const DuelingNetwork& net,
                                            std::span<const Observation> observations, double epsilon,
                                            Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw std::invalid_argument("epsilon must be in [0, 1]");
  std::vector<std::size_t> actions(observations.size());
  if (observations.empty()) return actions;
  const std::size_t n_actions = net.shape().n_actions;
  std::uniform_int_distribution<std::size_t> random_beam(0, n_actions - 1);

  // Exploration draws come first so the stream does not depend on Q.
  std::vector<bool> explore(observations.size(), false);
  if (epsilon > 0.0) {
    for (std::size_t k = 0; k < observations.size(); ++k) {
      explore[k] = uniform01(rng) < epsilon;
      if (explore[k]) actions[k] = random_beam(rng);
    }
  }
  if (std::find(explore.begin(), explore.end(), false) == explore.end()) return actions;

  std::vector<std::array<double, kObservationDim>> rows;
  rows.reserve(observations.size());
  for (const auto& o : observations) rows.push_back(o.features);
  const Matrix q = net.predict(to_batch(rows, kObservationDim));
  for (std::size_t k = 0; k < observations.size(); ++k) {
    if (!explore[k]) actions[k] = argmax_lowest(q.col(static_cast<Eigen::Index>(k)));
  }
  return actions;
}

std::vector<double> double_dqn_targets(const DuelingNetwork& online, const DuelingNetwork& target,
                                       std::span<const double> rewards, const Matrix& next_states,
                                       double gamma) {
  if (static_cast<Eigen::Index>(rewards.size()) != next_states.cols()) {
    throw std::invalid_argument("double_dqn_targets: rewards and next states differ in batch size");
  }
  if (online.shape().n_actions != target.shape().n_actions ||
      online.shape().input_dim != target.shape().input_dim) {
    throw std::invalid_argument("double_dqn_targets: incompatible networks");
  }
  std::vector<double> y(rewards.begin(), rewards.end());
  if (gamma == 0.0) return y;
  const Matrix q_online = online.predict(next_states);
  const Matrix q_target = target.predict(next_states);
  for (std::size_t j = 0; j < y.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    const std::size_t a = argmax_lowest(q_online.col(col));
    y[j] += gamma * q_target(static_cast<Eigen::Index>(a), col);
  }
  return y;
}

namespace {

NetworkShape shape_for(const DqnAgentConfig& config, std::size_t n_actions) {
  NetworkShape shape = config.network;
  shape.input_dim = kObservationDim;
  shape.n_actions = n_actions;
  return shape;
}

}  // namespace

DqnAgent::DqnAgent(DqnAgentConfig config, std::size_t n_actions, std::uint64_t seed)
    : config_(std::move(config)),
      init_rng_(derive_seed(seed, "init")),
      online_(shape_for(config_, n_actions), init_rng_),
      target_(shape_for(config_, n_actions)),
      adam_(online_.parameters(), config_.adam),
      buffer_(PriorityBufferConfig{config_.buffer_capacity, config_.per_alpha, config_.priority_epsilon}),
      explore_rng_(derive_seed(seed, "explore")),
      sample_rng_(derive_seed(seed, "replay")),
      dropout_rng_(derive_seed(seed, "dropout")),
      epsilon_(config_.epsilon_start) {
  config_.validate();
  config_.network = online_.shape();
  copy_parameters(online_, target_);
}

std::vector<std::size_t> DqnAgent::act(std::span<const Observation> observations) {
  return dqn_select_actions(online_, observations, epsilon_, explore_rng_);
}

std::vector<std::size_t> DqnAgent::act_greedy(std::span<const Observation> observations) const {
  Rng unused(0);
  return dqn_select_actions(online_, observations, 0.0, unused);
}

void DqnAgent::remember(std::span<const Observation> states, std::span<const std::size_t> actions,
                        const StepResult& step, std::span<const Observation> next_states,
                        const RewardParams& params) {
  for (std::size_t k = 0; k < states.size(); ++k) {
    buffer_.push(Transition{states[k], actions[k], transition_reward(config_.reward_variant, params, step, k),
                            next_states[k], k});
  }
}

std::optional<double> DqnAgent::learn(double beta) {
  if (buffer_.size() < config_.batch_size) return std::nullopt;

  const PriorityBuffer::Sample batch = buffer_.sample(config_.batch_size, beta, sample_rng_);
  const std::size_t n = batch.transitions.size();
  Matrix states(static_cast<Eigen::Index>(kObservationDim), static_cast<Eigen::Index>(n));
  Matrix next_states(static_cast<Eigen::Index>(kObservationDim), static_cast<Eigen::Index>(n));
  std::vector<double> rewards(n);
  std::vector<std::size_t> actions(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Transition& t = batch.transitions[j];
    for (std::size_t i = 0; i < kObservationDim; ++i) {
      states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.state.features[i];
      next_states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = t.next_state.features[i];
    }
    rewards[j] = t.reward;
    actions[j] = t.action;
  }

  const std::vector<double> targets = double_dqn_targets(online_, target_, rewards, next_states, config_.gamma);
  DuelingNetwork::BackwardResult grad = online_.backward(states, actions, targets, batch.is_weights, &dropout_rng_);
  if (!std::isfinite(grad.loss)) {
    throw std::runtime_error("non-finite training loss at gradient step " + std::to_string(gradient_steps_ + 1));
  }
  adam_step(adam_, online_.parameters(), grad.gradients);
  if (!online_.all_finite()) {
    throw std::runtime_error("non-finite network parameters after gradient step " +
                             std::to_string(gradient_steps_ + 1));
  }

  std::vector<double> td(grad.td_errors.data(), grad.td_errors.data() + grad.td_errors.size());
  buffer_.update_priorities(batch.indices, td);

  ++gradient_steps_;
  if (gradient_steps_ % config_.target_sync_period == 0) copy_parameters(online_, target_);
  return grad.loss;
}

void DqnAgent::decay_epsilon() { epsilon_ = std::max(config_.epsilon_floor, epsilon_ * config_.epsilon_decay); }

TrainResult train_loop(Environment& env, const DqnAgentConfig& config, std::size_t t_train, std::uint64_t seed) {
  TrainResult result{DqnAgent(config, env.n_beams(), seed), {}};
  DqnAgent& agent = result.agent;
  result.log.reserve(t_train);

  std::vector<Observation> obs = env.observations();
  for (std::size_t t = 0; t < t_train; ++t) {
    const double eps = agent.epsilon();
    const std::vector<std::size_t> actions = agent.act(obs);
    const StepResult step = env.step(actions);
    std::vector<Observation> next_obs = env.observations();
    agent.remember(obs, actions, step, next_obs, env.config().reward);

    const double progress = t_train > 1 ? static_cast<double>(t) / static_cast<double>(t_train - 1) : 1.0;
    const double beta = config.per_beta_start + (config.per_beta_end - config.per_beta_start) * progress;
    std::optional<double> loss;
    for (std::size_t u = 0; u < config.updates_per_step; ++u) {
      if (auto l = agent.learn(beta)) loss = l;
    }
    agent.decay_epsilon();

    double reward_sum = 0.0;
    for (std::size_t k = 0; k < step.per_user_snr_db.size(); ++k) {
      reward_sum += transition_reward(config.reward_variant, env.config().reward, step, k);
    }
    result.log.push_back({t + 1, eps, loss, reward_sum / static_cast<double>(step.per_user_snr_db.size()),
                          agent.buffer().size(), step.n_switches, agent.buffer().evictions()});
    obs = std::move(next_obs);
  }
  return result;
}

void write_training_log(const std::filesystem::path& path, const std::vector<TrainingLogRow>& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write training log: " + path.string());
  out << "step,epsilon,loss,mean_reward,buffer_size,n_switches,evictions\n";
  for (const auto& row : log) {
    out << row.step << ',' << detail::fmt_double(row.epsilon) << ','
        << (row.loss ? detail::fmt_double(*row.loss) : std::string()) << ','
        << detail::fmt_double(row.mean_reward) << ',' << row.buffer_size << ',' << row.n_switches << ','
        << row.evictions << '\n';
  }
}

}  // namespace beamsw
