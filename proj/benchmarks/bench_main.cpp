#include <benchmark/benchmark.h>

#include "beamsw/config.hpp"
#include "beamsw/dqn.hpp"
#include "beamsw/env.hpp"

using namespace beamsw;

namespace {

ExperimentConfig preset_for(int64_t which) { return make_preset(which == 0 ? Preset::kDesk : Preset::kPaper); }

}  // namespace

// One greedy decision for all K users (0 = desk, 1 = full scale).
static void BM_Inference(benchmark::State& state) {
  const ExperimentConfig c = preset_for(state.range(0));
  NetworkShape shape = c.dqn.network;
  shape.n_actions = c.env.n_beams;
  Rng rng(1);
  const DuelingNetwork net(shape, rng);
  Environment env(c.env, 1);
  const std::vector<Observation> obs = env.observations();
  Rng unused(0);
  for (auto _ : state) benchmark::DoNotOptimize(dqn_select_actions(net, obs, 0.0, unused));
}
BENCHMARK(BM_Inference)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_EnvStep(benchmark::State& state) {
  const ExperimentConfig c = preset_for(state.range(0));
  Environment env(c.env, 2);
  std::vector<std::size_t> actions(c.env.n_users, 0);
  for (auto _ : state) benchmark::DoNotOptimize(env.step(actions));
}
BENCHMARK(BM_EnvStep)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

// One gradient step on a full replay batch.
static void BM_TrainStep(benchmark::State& state) {
  const ExperimentConfig c = preset_for(state.range(0));
  Environment env(c.env, 3);
  DqnAgent agent(c.dqn, env.n_beams(), 3);
  std::vector<Observation> obs = env.observations();
  while (agent.buffer().size() < c.dqn.batch_size) {
    const auto actions = agent.act(obs);
    const StepResult step = env.step(actions);
    const auto next = env.observations();
    agent.remember(obs, actions, step, next, c.env.reward);
    obs = next;
  }
  for (auto _ : state) benchmark::DoNotOptimize(agent.learn(0.4));
}
BENCHMARK(BM_TrainStep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
