#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "beamsw/experiment.hpp"
#include "beamsw/selftest.hpp"

using namespace beamsw;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config(const fs::path& out) {
  ExperimentConfig c = make_preset(Preset::kDesk);
  c.env.n_users = 3;
  c.env.n_antennas = 8;
  c.env.n_beams = 8;
  c.t_train = 60;
  c.t_eval = 20;
  c.seeds = {1, 2};
  c.dqn.network.hidden = {16, 8};
  c.dqn.batch_size = 16;
  c.dqn.buffer_capacity = 200;
  c.out_dir = out.string();
  return c;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("beamsw_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Experiment, SeedStreamsAreSharedAcrossAgents) {
  EXPECT_EQ(environment_seed(3), environment_seed(3));
  EXPECT_NE(environment_seed(3), environment_seed(4));
  EXPECT_NE(agent_seed(3, "vanilla-dqn"), agent_seed(3, "proposed-dqn"));
  EXPECT_NE(agent_seed(3, "mab"), environment_seed(3));
}

TEST(Experiment, CartesianRunsAndManifestFiles) {
  const fs::path out = scratch("cartesian");
  const ExperimentResult r = run_experiment(tiny_config(out), {1});
  ASSERT_TRUE(r.all_ok());
  EXPECT_EQ(r.summaries.size(), 8u);
  EXPECT_EQ(r.comparison.size(), 4u);
  for (const auto& f : r.manifest.files) EXPECT_TRUE(fs::exists(out / f)) << f;
  for (const auto& run : r.manifest.runs) {
    for (const auto& f : run.files) EXPECT_TRUE(fs::exists(out / f)) << f;
    const bool learns = run.agent == "vanilla-dqn" || run.agent == "proposed-dqn";
    EXPECT_EQ(fs::exists(out / run.agent / ("seed-" + std::to_string(run.seed)) / "model.ckpt"), learns);
  }
  EXPECT_NE(slurp(out / "manifest.json").find(r.manifest.config_hash), std::string::npos);
  fs::remove_all(out);
}

TEST(Experiment, RerunIsByteIdentical) {
  const fs::path a = scratch("rerun_a");
  const fs::path b = scratch("rerun_b");
  run_experiment(tiny_config(a), {1});
  ExperimentOptions two;
  two.workers = 2;  // scheduling must not leak into results
  run_experiment(tiny_config(b), two);
  std::size_t compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    const auto name = entry.path().filename();
    if (!entry.is_regular_file() || name == "manifest.json" || name == "config.yaml") continue;  // record out_dir
    const fs::path rel = fs::relative(entry.path(), a);
    EXPECT_EQ(slurp(entry.path()), slurp(b / rel)) << rel;
    ++compared;
  }
  EXPECT_GE(compared, 8u * 2u + 3u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiment, FailedRunIsRecordedWithoutAbortingSiblings) {
  const fs::path out = scratch("failure");
  fs::create_directories(out / "mab");
  std::ofstream(out / "mab" / "seed-2") << "not a directory";
  const ExperimentResult r = run_experiment(tiny_config(out), {1});
  EXPECT_FALSE(r.all_ok());
  EXPECT_EQ(r.summaries.size(), 7u);
  std::size_t failed = 0;
  for (const auto& run : r.manifest.runs) {
    if (!run.ok) {
      ++failed;
      EXPECT_EQ(run.agent, "mab");
      EXPECT_EQ(run.seed, 2u);
      EXPECT_FALSE(run.error.empty());
    }
  }
  EXPECT_EQ(failed, 1u);
  EXPECT_NE(slurp(out / "manifest.json").find("\"error\""), std::string::npos);
  fs::remove_all(out);
}

TEST(Experiment, GreedySkipsTraining) {
  const fs::path out = scratch("greedy");
  ExperimentConfig c = tiny_config(out);
  c.agents = {"greedy"};
  c.t_train = 1000000;  // fast-forward only, so this stays cheap
  const RunRecord rec = run_single(c, "greedy", 1, {}, "");
  EXPECT_TRUE(rec.ok) << rec.error;
  EXPECT_TRUE(rec.files.empty());
}

TEST(Experiment, SweepHasTwoRegimeSections) {
  const fs::path out = scratch("sweep");
  ExperimentConfig c = tiny_config(out);
  c.agents = {"greedy"};
  c.t_eval = 2000;
  const SweepResult s = sweep_blockage(c, {1});
  std::size_t sections = 0;
  for (std::size_t pos = 0; (pos = s.report_markdown.find("## Regime:", pos)) != std::string::npos; ++pos) ++sections;
  EXPECT_EQ(sections, 2u);
  EXPECT_TRUE(fs::exists(out / "sweep.md"));
  EXPECT_TRUE(fs::exists(out / "default" / "manifest.json"));
  EXPECT_TRUE(fs::exists(out / "high" / "manifest.json"));
  for (const auto& run : s.default_regime.summaries) EXPECT_NEAR(run.blocked_fraction, 0.0964, 0.03);
  for (const auto& run : s.high_regime.summaries) EXPECT_NEAR(run.blocked_fraction, 0.5, 0.05);
  fs::remove_all(out);
}

TEST(Experiment, BenchmarkAndCheckpointEvaluation) {
  ExperimentConfig c = tiny_config(scratch("bench"));
  EXPECT_THROW(benchmark_inference(c, 0), std::invalid_argument);
  const LatencyStats s = benchmark_inference(c, 20);
  EXPECT_EQ(s.n_repeats, 20u);
  EXPECT_TRUE(std::isfinite(s.mean_ms));
  EXPECT_GE(s.mean_ms, 0.0);
  EXPECT_LE(s.min_ms, s.median_ms);
  EXPECT_LE(s.median_ms, s.p99_ms);
  EXPECT_LE(s.p99_ms, s.max_ms);

  const fs::path out = scratch("ckpt");
  c.out_dir = out.string();
  c.agents = {"proposed-dqn"};
  c.seeds = {1};
  const ExperimentResult r = run_experiment(c, {1});
  ASSERT_TRUE(r.all_ok());
  // The fast-forward skips the agent's own link history, so only the
  // exogenous part of the trajectory matches the in-run evaluation.
  const fs::path ckpt = out / "proposed-dqn" / "seed-1" / "model.ckpt";
  const RunSummary once = evaluate_checkpoint(c, ckpt, 1, "proposed-dqn");
  EXPECT_EQ(once, evaluate_checkpoint(c, ckpt, 1, "proposed-dqn"));
  EXPECT_EQ(once.n_steps, c.t_eval);
  EXPECT_EQ(once.blocked_fraction, r.summaries[0].blocked_fraction);

  ExperimentConfig other = c;
  other.env.n_beams = 4;
  EXPECT_THROW(evaluate_checkpoint(other, ckpt, 1), std::exception);
  fs::remove_all(out);
}

TEST(SelfTest, AllChecksPass) {
  const auto checks = run_selftest();
  EXPECT_GE(checks.size(), 10u);
  for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.name << ": " << c.detail;
}
