#include <gtest/gtest.h>

#include "beamsw/policy.hpp"

using namespace beamsw;

namespace {

EnvConfig small_env() {
  EnvConfig cfg;
  cfg.n_users = 5;
  cfg.n_antennas = 16;
  cfg.n_beams = 16;
  return cfg;
}

}  // namespace

TEST(Greedy, TieBreaksToLowestIndex) {
  Eigen::MatrixXd t(2, 4);
  t << 3, 9, 9, 1,
       -2, -1, -5, -1;
  const auto a = greedy_actions(t);
  EXPECT_EQ(a[0], 1u);
  EXPECT_EQ(a[1], 1u);
}

TEST(Greedy, RealizesTheRowMaximum) {
  Environment env(small_env(), 3);
  GreedyPolicy greedy;
  for (int t = 0; t < 200; ++t) {
    const auto actions = greedy.act(env);
    const Eigen::MatrixXd table = env.oracle_snr_table();
    const StepResult r = env.step(actions);
    for (std::size_t k = 0; k < env.n_users(); ++k) {
      const double best = table.row(Eigen::Index(k)).maxCoeff();
      ASSERT_EQ(r.per_user_snr_db[k], best);
      for (std::size_t b = 0; b < env.n_beams(); ++b) ASSERT_LE(table(Eigen::Index(k), Eigen::Index(b)), best);
    }
  }
}

TEST(Ucb, PolicySweepsThenLearnsOnline) {
  Environment env(small_env(), 4);
  UcbPolicy mab(5, 16, 2.0);
  run_policy(env, mab, 16);
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t b = 0; b < 16; ++b) EXPECT_EQ(mab.bandits().count(k, b), 1u);
  }
  const Evaluation e = evaluate(env, mab, 10, 4);
  EXPECT_EQ(mab.bandits().total_pulls(0), 26u);
  EXPECT_EQ(e.summary.n_steps, 10u);
  EXPECT_EQ(e.summary.agent_name, "mab");
}

TEST(Dqn, EvaluationNeverTouchesTheNetwork) {
  NetworkShape shape;
  shape.hidden = {16, 8};
  shape.n_actions = 16;
  Rng rng(9);
  const DuelingNetwork net(shape, rng);
  const std::uint64_t before = net.checksum();
  Environment env(small_env(), 5);
  DqnPolicy policy("proposed-dqn", net);
  const Evaluation e = evaluate(env, policy, 50, 5, "abc");
  EXPECT_EQ(policy.network().checksum(), before);
  EXPECT_EQ(e.summary.config_hash, "abc");

  NetworkShape wrong = shape;
  wrong.n_actions = 8;
  DqnPolicy bad("x", DuelingNetwork(wrong));
  Environment env2(small_env(), 5);
  EXPECT_THROW(bad.act(env2), std::invalid_argument);
}

TEST(Evaluate, DeterministicSummaries) {
  auto once = [] {
    Environment env(small_env(), 11);
    GreedyPolicy g;
    return evaluate(env, g, 100, 11).summary;
  };
  const RunSummary a = once();
  const RunSummary b = once();
  EXPECT_EQ(a, b);
  EXPECT_EQ(summary_to_json(a), summary_to_json(b));
}
