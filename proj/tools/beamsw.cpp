// beamsw: command line front end for the beam switching experiments.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "beamsw/config.hpp"
#include "beamsw/experiment.hpp"
#include "beamsw/metrics.hpp"
#include "beamsw/selftest.hpp"

namespace fs = std::filesystem;
using namespace beamsw;

namespace {

struct CommonArgs {
  std::string preset = "paper";
  std::string config_path;
  std::string out_dir;
  std::string seeds;
  std::string agents;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--preset", args.preset, "Base configuration")
      ->check(CLI::IsMember({"paper", "desk"}))
      ->capture_default_str();
  cmd->add_option("--config", args.config_path, "YAML file overlaid on the preset")->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "Output directory");
  cmd->add_option("--seeds", args.seeds, "Comma separated seed list, e.g. 1,2,3");
  cmd->add_option("--agents", args.agents, "Comma separated agents (greedy,mab,vanilla-dqn,proposed-dqn)");
}

ExperimentConfig resolve(const CommonArgs& args) {
  ExperimentConfig cfg = make_preset(parse_preset(args.preset));
  if (!args.config_path.empty()) cfg = parse_config(args.config_path, cfg);
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  if (!args.seeds.empty()) cfg.seeds = parse_seed_list(args.seeds);
  if (!args.agents.empty()) cfg.agents = parse_agent_list(args.agents);
  validate_config(cfg);
  return cfg;
}

void print_latency(std::ostream& os, const LatencyStats& s) {
  os << std::fixed << std::setprecision(4) << "repeats " << s.n_repeats << "\n"
     << "mean_ms " << s.mean_ms << "\nmedian_ms " << s.median_ms << "\np99_ms " << s.p99_ms << "\nmin_ms "
     << s.min_ms << "\nmax_ms " << s.max_ms << "\n";
}

int report_failures(const ExperimentResult& r) {
  int failed = 0;
  for (const auto& run : r.manifest.runs) {
    if (!run.ok) {
      std::cerr << "run failed: " << run.agent << " seed " << run.seed << ": " << run.error << "\n";
      ++failed;
    }
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-user mmWave beam switching: DQN, UCB and oracle baselines"};
  app.require_subcommand(1);

  CommonArgs run_args, eval_args, bench_args, sweep_args;
  auto* run = app.add_subcommand("run", "Train and evaluate every agent for every seed");
  add_common(run, run_args);

  auto* eval = app.add_subcommand("eval", "Evaluate a saved network checkpoint");
  add_common(eval, eval_args);
  std::string eval_ckpt;
  std::string eval_name = "checkpoint";
  eval->add_option("--checkpoint", eval_ckpt, "model.ckpt written by `run`")->required()->check(CLI::ExistingFile);
  eval->add_option("--name", eval_name, "Agent name recorded in the summary")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Inference latency of one decision for all users");
  add_common(bench, bench_args);
  std::size_t repeats = 200;
  std::string bench_ckpt;
  bench->add_option("--repeats", repeats, "Timed repetitions")->check(CLI::PositiveNumber)->capture_default_str();
  bench->add_option("--checkpoint", bench_ckpt, "Time this network instead of a fresh one")
      ->check(CLI::ExistingFile);

  auto* sweep = app.add_subcommand("sweep", "Run the experiment under the default and high blockage regimes");
  add_common(sweep, sweep_args);

  auto* selftest = app.add_subcommand("selftest", "Quick invariant checks");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentOptions opts;
    opts.log = &std::cerr;

    if (*run) {
      const ExperimentConfig cfg = resolve(run_args);
      const ExperimentResult r = run_experiment(cfg, opts);
      std::cout << comparison_markdown(r.comparison);
      std::cout << "artifacts: " << fs::absolute(cfg.out_dir).string() << "\n";
      return report_failures(r);
    }
    if (*eval) {
      const ExperimentConfig cfg = resolve(eval_args);
      for (std::uint64_t seed : cfg.seeds) std::cout << summary_to_json(evaluate_checkpoint(cfg, eval_ckpt, seed, eval_name));
      return 0;
    }
    if (*bench) {
      const ExperimentConfig cfg = resolve(bench_args);
      std::optional<Checkpoint> ckpt;
      if (!bench_ckpt.empty()) ckpt = load_checkpoint(bench_ckpt);
      const LatencyStats stats = benchmark_inference(cfg, repeats, ckpt ? &ckpt->network : nullptr);
      print_latency(std::cout, stats);
      if (!bench_args.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        std::ofstream out(fs::path(cfg.out_dir) / "bench.txt");
        print_latency(out, stats);
      }
      return 0;
    }
    if (*sweep) {
      const ExperimentConfig cfg = resolve(sweep_args);
      const SweepResult r = sweep_blockage(cfg, opts);
      std::cout << r.report_markdown;
      const int a = report_failures(r.default_regime);
      const int b = report_failures(r.high_regime);
      return a != 0 || b != 0 ? 1 : 0;
    }
    if (*selftest) {
      int failed = 0;
      for (const auto& c : run_selftest()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed) {
          std::cout << ": " << c.detail;
          ++failed;
        }
        std::cout << "\n";
      }
      return failed == 0 ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
