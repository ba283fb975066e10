#include "beamsw/experiment.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "beamsw/dqn.hpp"
#include "beamsw/policy.hpp"
#include "text.hpp"

namespace beamsw {

namespace fs = std::filesystem;
using nlohmann::json;

bool ExperimentResult::all_ok() const {
  return std::all_of(manifest.runs.begin(), manifest.runs.end(), [](const RunRecord& r) { return r.ok; });
}

std::uint64_t environment_seed(std::uint64_t seed) { return derive_seed(seed, "environment"); }

std::uint64_t agent_seed(std::uint64_t seed, const std::string& agent) { return derive_seed(seed, agent, "agent"); }

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BEAMSW_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

bool is_dqn(const std::string& agent) { return agent == "vanilla-dqn" || agent == "proposed-dqn"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace

RunRecord run_single(const ExperimentConfig& config, const std::string& agent, std::uint64_t seed,
                     const fs::path& run_dir, const std::string& hash) {
  RunRecord rec;
  rec.agent = agent;
  rec.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const bool write = !run_dir.empty();
    if (write) fs::create_directories(run_dir);
    Environment env(config.env, environment_seed(seed));

    std::unique_ptr<Policy> policy;
    if (agent == "greedy") {
      env.advance_exogenous(config.t_train);
      policy = std::make_unique<GreedyPolicy>();
    } else if (agent == "mab") {
      auto ucb = std::make_unique<UcbPolicy>(env.n_users(), env.n_beams(), config.ucb_c, config.ucb_window);
      run_policy(env, *ucb, config.t_train);
      policy = std::move(ucb);
    } else if (is_dqn(agent)) {
      DqnAgentConfig dqn = config.dqn;
      dqn.reward_variant = agent == "vanilla-dqn" ? RewardVariant::kVanilla : RewardVariant::kStabilityAware;
      TrainResult trained = train_loop(env, dqn, config.t_train, agent_seed(seed, agent));
      if (write) {
        write_training_log(run_dir / "train_log.csv", trained.log);
        save_checkpoint(run_dir / "model.ckpt", trained.agent.online(), &trained.agent.optimizer());
        rec.files.push_back("train_log.csv");
        rec.files.push_back("model.ckpt");
      }
      policy = std::make_unique<DqnPolicy>(agent, trained.agent.online());
    } else {
      throw std::invalid_argument("unknown agent '" + agent + "'");
    }

    Evaluation ev = evaluate(env, *policy, config.t_eval, seed, hash);
    rec.summary = ev.summary;
    if (write) {
      write_step_csv(run_dir / "steps.csv", ev.metrics);
      write_summary_json(run_dir / "summary.json", ev.summary);
      rec.files.push_back("steps.csv");
      rec.files.push_back("summary.json");
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
  validate_config(config);
  ExperimentResult result;
  RunManifest& manifest = result.manifest;
  manifest.config_yaml = serialize_config(config);
  manifest.config_hash = config_hash(config);
  manifest.started_utc = utc_now();

  const fs::path out_dir = config.out_dir;
  if (options.write_files) fs::create_directories(out_dir);

  struct Job {
    std::string agent;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& agent : config.agents) {
    for (std::uint64_t seed : config.seeds) jobs.push_back({agent, seed});
  }

  std::vector<RunRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      const fs::path run_dir =
          options.write_files ? out_dir / job.agent / ("seed-" + std::to_string(job.seed)) : fs::path();
      records[i] = run_single(config, job.agent, job.seed, run_dir, manifest.config_hash);
      if (options.log != nullptr) {
        std::lock_guard lock(log_mutex);
        const RunRecord& r = records[i];
        *options.log << "[" << r.agent << " seed " << r.seed << "] ";
        if (r.ok) {
          *options.log << "snr " << detail::fmt_fixed(r.summary.mean_snr_db, 2) << " dB, coverage "
                       << detail::fmt_fixed(100.0 * r.summary.coverage_fraction, 1) << "%, stability "
                       << detail::fmt_fixed(r.summary.stability_score, 4) << " ("
                       << detail::fmt_fixed(r.wall_seconds, 1) << " s)\n";
        } else {
          *options.log << "FAILED: " << r.error << "\n";
        }
      }
    }
  };

  const std::size_t n_workers = std::min(resolve_workers(options.workers), std::max<std::size_t>(jobs.size(), 1));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  for (auto& r : records) {
    if (r.ok) result.summaries.push_back(r.summary);
    const std::string prefix = r.agent + "/seed-" + std::to_string(r.seed) + "/";
    for (auto& f : r.files) f = prefix + f;
  }
  manifest.runs = std::move(records);
  result.comparison = compare_runs(result.summaries, config.top_k, config.top_k_metric);

  if (options.write_files) {
    write_text(out_dir / "config.yaml", manifest.config_yaml);
    write_comparison_csv(out_dir / "comparison.csv", result.comparison);
    write_text(out_dir / "comparison.md", comparison_markdown(result.comparison));
    manifest.files = {"config.yaml", "comparison.csv", "comparison.md", "manifest.json"};
  }
  manifest.finished_utc = utc_now();
  if (options.write_files) write_text(out_dir / "manifest.json", manifest_to_json(manifest));
  return result;
}

SweepResult sweep_blockage(const ExperimentConfig& config, const ExperimentOptions& options) {
  SweepResult sweep;
  std::ostringstream report;
  report << "# Blockage regime sweep\n";
  for (BlockageRegime regime : {BlockageRegime::kDefault, BlockageRegime::kHigh}) {
    ExperimentConfig c = config;
    c.apply_blockage_regime(regime);
    c.out_dir = (fs::path(config.out_dir) / to_string(regime)).string();
    if (options.log != nullptr) *options.log << "== blockage regime: " << to_string(regime) << "\n";
    ExperimentResult r = run_experiment(c, options);

    report << "\n## Regime: " << to_string(regime) << " (P_BB = " << detail::fmt_double(c.env.blockage.p_stay_blocked)
           << ", P_UB = " << detail::fmt_double(c.env.blockage.p_become_blocked) << ", stationary blocked fraction "
           << detail::fmt_fixed(c.env.blockage.stationary_blocked_fraction(), 4) << ")\n\n";
    report << comparison_markdown(r.comparison) << "\n";
    report << "| Agent | Seed | Reliability | Observed blocked fraction |\n|---|---|---|---|\n";
    for (const auto& s : r.summaries) {
      report << "| " << s.agent_name << " | " << s.seed << " | " << detail::fmt_fixed(s.reliability_fraction, 4)
             << " | " << detail::fmt_fixed(s.blocked_fraction, 4) << " |\n";
    }
    (regime == BlockageRegime::kDefault ? sweep.default_regime : sweep.high_regime) = std::move(r);
  }
  sweep.report_markdown = report.str();
  if (options.write_files) {
    fs::create_directories(config.out_dir);
    write_text(fs::path(config.out_dir) / "sweep.md", sweep.report_markdown);
  }
  return sweep;
}

LatencyStats benchmark_inference(const ExperimentConfig& config, std::size_t n_repeats,
                                 const DuelingNetwork* network) {
  if (n_repeats == 0) throw std::invalid_argument("benchmark_inference: n_repeats must be >= 1");
  Environment env(config.env, environment_seed(config.seeds.empty() ? 0 : config.seeds.front()));
  NetworkShape shape = config.dqn.network;
  shape.input_dim = kObservationDim;
  shape.n_actions = env.n_beams();
  Rng init(derive_seed(0, "benchmark"));
  const DuelingNetwork net = network != nullptr ? *network : DuelingNetwork(shape, init);
  const std::vector<Observation> obs = env.observations();
  Rng rng(1);

  std::size_t sink = 0;
  for (int i = 0; i < 3; ++i) sink += dqn_select_actions(net, obs, 0.0, rng).front();

  std::vector<double> ms;
  ms.reserve(n_repeats);
  for (std::size_t i = 0; i < n_repeats; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    sink += dqn_select_actions(net, obs, 0.0, rng).front();
    ms.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
  }
  (void)sink;

  LatencyStats stats;
  stats.n_repeats = n_repeats;
  double total = 0.0;
  for (double v : ms) total += v;
  stats.mean_ms = total / static_cast<double>(n_repeats);
  std::sort(ms.begin(), ms.end());
  stats.min_ms = ms.front();
  stats.max_ms = ms.back();
  stats.median_ms = n_repeats % 2 == 1 ? ms[n_repeats / 2] : 0.5 * (ms[n_repeats / 2 - 1] + ms[n_repeats / 2]);
  const auto p99_index = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(n_repeats))) - 1;
  stats.p99_ms = ms[std::min(p99_index, n_repeats - 1)];
  return stats;
}

RunSummary evaluate_checkpoint(const ExperimentConfig& config, const fs::path& checkpoint, std::uint64_t seed,
                               const std::string& agent_name) {
  Checkpoint ckpt = load_checkpoint(checkpoint);
  Environment env(config.env, environment_seed(seed));
  if (ckpt.network.shape().n_actions != env.n_beams() || ckpt.network.shape().input_dim != kObservationDim) {
    throw std::invalid_argument("checkpoint architecture does not match the configured scenario");
  }
  env.advance_exogenous(config.t_train);
  DqnPolicy policy(agent_name, ckpt.network);
  return evaluate(env, policy, config.t_eval, seed, config_hash(config)).summary;
}

std::string manifest_to_json(const RunManifest& m) {
  json runs = json::array();
  for (const auto& r : m.runs) {
    json run{{"agent", r.agent}, {"seed", r.seed},   {"ok", r.ok},
             {"files", r.files}, {"wall_seconds", r.wall_seconds}};
    if (!r.ok) run["error"] = r.error;
    runs.push_back(std::move(run));
  }
  const json j{{"format_version", m.format_version},
               {"config_hash", m.config_hash},
               {"config_yaml", m.config_yaml},
               {"started_utc", m.started_utc},
               {"finished_utc", m.finished_utc},
               {"files", m.files},
               {"runs", runs}};
  return j.dump(2) + "\n";
}

}  // namespace beamsw
