#include <gtest/gtest.h>

#include <cmath>

#include "beamsw/dqn.hpp"

using namespace beamsw;

namespace {

NetworkShape tiny(std::size_t n_actions) {
  NetworkShape s;
  s.hidden = {8};
  s.n_actions = n_actions;
  s.dropout = 0.0;
  return s;
}

// A net whose eval-mode Q row equals `row` for every input: zero trunk weights
// leave BN output at beta, so the heads only see biases through zero features.
DuelingNetwork constant_q(const std::vector<double>& row) {
  DuelingNetwork net(tiny(row.size()));
  double mean = 0.0;
  for (double v : row) mean += v;
  mean /= double(row.size());
  net.value_bias()(0, 0) = mean;
  for (std::size_t a = 0; a < row.size(); ++a) net.advantage_bias()(Eigen::Index(a), 0) = row[a];
  return net;
}

EnvConfig small_env() {
  EnvConfig cfg;
  cfg.n_users = 4;
  cfg.n_antennas = 8;
  cfg.n_beams = 8;
  return cfg;
}

DqnAgentConfig small_agent() {
  DqnAgentConfig cfg;
  cfg.network.hidden = {16, 16};
  cfg.batch_size = 16;
  cfg.buffer_capacity = 1000;
  return cfg;
}

}  // namespace

TEST(DoubleDqn, ToyTarget) {
  const DuelingNetwork online = constant_q({0.2, 0.5});
  const DuelingNetwork target = constant_q({0.9, 0.3});
  const Matrix next = Matrix::Zero(8, 1);
  const std::vector<double> r = {1.0};
  const auto y = double_dqn_targets(online, target, r, next, 0.99);
  EXPECT_DOUBLE_EQ(y[0], 1.0 + 0.99 * 0.3);
  EXPECT_NEAR(y[0], 1.297, 1e-15);
}

TEST(DoubleDqn, GammaZeroAndSameNetwork) {
  Rng rng(1);
  DuelingNetwork net(tiny(5), rng);
  const Matrix next = Matrix::Random(8, 6);
  const std::vector<double> r = {1, 2, 3, 4, 5, 6};
  const auto y0 = double_dqn_targets(net, net, r, next, 0.0);
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_EQ(y0[j], r[j]);

  const auto y = double_dqn_targets(net, net, r, next, 0.9);
  const Matrix q = net.predict(next);
  for (std::size_t j = 0; j < r.size(); ++j) EXPECT_EQ(y[j], r[j] + 0.9 * q.col(Eigen::Index(j)).maxCoeff());
}

TEST(Selection, TieBreaksLowAndEpsilonExtremes) {
  EXPECT_EQ(argmax_lowest(Eigen::Vector4d(3, 9, 9, 1)), 1u);

  DuelingNetwork flat = constant_q({0.0, 0.0, 0.0, 0.0});
  flat.value_bias()(0, 0) = 4.2;
  std::vector<Observation> obs(5);
  Rng rng(2);
  for (std::size_t a : dqn_select_actions(flat, obs, 0.0, rng)) EXPECT_EQ(a, 0u);

  const DuelingNetwork peaked = constant_q({0.0, 0.0, 1.0, 0.0});
  for (std::size_t a : dqn_select_actions(peaked, obs, 0.0, rng)) EXPECT_EQ(a, 2u);

  const DuelingNetwork wide = constant_q(std::vector<double>(64, 0.0));
  std::vector<Observation> many(1000);
  std::vector<double> counts(64, 0.0);
  for (int i = 0; i < 100; ++i) {
    for (std::size_t a : dqn_select_actions(wide, many, 1.0, rng)) counts[a] += 1.0;
  }
  for (double c : counts) EXPECT_NEAR(c / 1e5, 1.0 / 64.0, 0.02 / 64.0 * 8.0);
  EXPECT_THROW(dqn_select_actions(wide, many, 1.5, rng), std::invalid_argument);
}

TEST(Agent, EpsilonDecayAndFloor) {
  DqnAgentConfig cfg = small_agent();
  DqnAgent agent(cfg, 8, 3);
  EXPECT_DOUBLE_EQ(agent.epsilon(), 0.7);
  agent.decay_epsilon();
  EXPECT_NEAR(agent.epsilon(), 0.69979, 1e-12);
  for (int i = 0; i < 20000; ++i) agent.decay_epsilon();
  EXPECT_DOUBLE_EQ(agent.epsilon(), 0.05);
  agent.decay_epsilon();
  EXPECT_DOUBLE_EQ(agent.epsilon(), 0.05);
}

TEST(Agent, WarmupGateSkipsUpdates) {
  Environment env(small_env(), 4);
  DqnAgentConfig cfg = small_agent();
  cfg.batch_size = 64;  // needs 16 steps of 4 users
  const TrainResult r = train_loop(env, cfg, 15, 5);
  EXPECT_EQ(r.agent.gradient_steps(), 0u);
  for (const auto& row : r.log) EXPECT_FALSE(row.loss.has_value());

  Environment env2(small_env(), 4);
  const TrainResult r2 = train_loop(env2, cfg, 16, 5);
  EXPECT_EQ(r2.agent.gradient_steps(), 1u);
}

TEST(Agent, TrainingIsDeterministic) {
  DqnAgentConfig cfg = small_agent();
  Environment a(small_env(), 6);
  Environment b(small_env(), 6);
  const TrainResult ra = train_loop(a, cfg, 120, 7);
  const TrainResult rb = train_loop(b, cfg, 120, 7);
  ASSERT_EQ(ra.log.size(), rb.log.size());
  for (std::size_t i = 0; i < ra.log.size(); ++i) {
    ASSERT_EQ(ra.log[i].loss, rb.log[i].loss);
    ASSERT_EQ(ra.log[i].epsilon, rb.log[i].epsilon);
    ASSERT_EQ(ra.log[i].mean_reward, rb.log[i].mean_reward);
  }
  EXPECT_EQ(ra.agent.online().checksum(), rb.agent.online().checksum());
}

TEST(Agent, TargetSyncsEveryPeriod) {
  DqnAgentConfig cfg = small_agent();
  cfg.target_sync_period = 10;
  Environment env(small_env(), 8);
  const TrainResult r = train_loop(env, cfg, 3 + 20, 9);  // the 4th step fills one batch
  ASSERT_EQ(r.agent.gradient_steps(), 20u);
  EXPECT_EQ(r.agent.target().checksum(), r.agent.online().checksum());
}

TEST(Agent, VariantsDifferOnlyInStoredReward) {
  RewardParams p;
  StepResult step;
  step.per_user_snr_db = {16.0, 4.0};
  step.per_user_prev_snr_db = {10.0, 4.0};
  step.n_switches = 1;
  EXPECT_DOUBLE_EQ(transition_reward(RewardVariant::kVanilla, p, step, 0), 5.0);
  EXPECT_DOUBLE_EQ(transition_reward(RewardVariant::kStabilityAware, p, step, 0), 5.0 - 15.0 - 20.0);
  EXPECT_DOUBLE_EQ(transition_reward(RewardVariant::kVanilla, p, step, 1), 0.5);

  // Same seed, same environment: the first steps' actions coincide because
  // exploration draws do not depend on rewards.
  DqnAgentConfig cv = small_agent();
  cv.reward_variant = RewardVariant::kVanilla;
  DqnAgentConfig cs = small_agent();
  Environment ea(small_env(), 10), eb(small_env(), 10);
  const TrainResult a = train_loop(ea, cv, 3, 11);
  const TrainResult b = train_loop(eb, cs, 3, 11);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.log[i].n_switches, b.log[i].n_switches);
  EXPECT_EQ(a.agent.online().checksum(), b.agent.online().checksum());
}

TEST(Agent, ConfigValidation) {
  DqnAgentConfig cfg;
  cfg.gamma = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = DqnAgentConfig{};
  cfg.epsilon_floor = 0.8;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = DqnAgentConfig{};
  cfg.batch_size = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
