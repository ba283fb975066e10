#include "beamsw/metrics.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "text.hpp"

namespace beamsw {

using nlohmann::json;

MetricAccumulator::MetricAccumulator(std::size_t n_users, double reliability_threshold_db,
                                     double accuracy_threshold_db)
    : n_users_(n_users),
      reliability_threshold_db_(reliability_threshold_db),
      accuracy_threshold_db_(accuracy_threshold_db) {
  if (n_users == 0) throw std::invalid_argument("MetricAccumulator: n_users must be >= 1");
}

void MetricAccumulator::record_step(const StepResult& step) {
  if (step.per_user_snr_db.size() != n_users_ || step.per_user_throughput_mbps.size() != n_users_ ||
      step.per_user_blocked.size() != n_users_) {
    throw std::invalid_argument("record_step: step result does not match the user count");
  }
  records_.push_back({step.per_user_snr_db, step.per_user_throughput_mbps, step.per_user_blocked, step.n_switches});
  total_switches_ += step.n_switches;
}

namespace {

void require_steps(const MetricAccumulator& acc, std::size_t n, const char* what) {
  if (acc.n_steps() < n) {
    throw std::invalid_argument(std::string(what) + " needs at least " + std::to_string(n) + " recorded step(s)");
  }
}

double fraction_at_least(const MetricAccumulator& acc, double threshold) {
  std::size_t hits = 0;
  for (const auto& r : acc.records()) {
    for (double s : r.snr_db) hits += s >= threshold ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(acc.n_steps() * acc.n_users());
}

double mean_of(const MetricAccumulator& acc, const std::vector<double> StepRecord::*field) {
  double sum = 0.0;
  for (const auto& r : acc.records()) sum += std::accumulate((r.*field).begin(), (r.*field).end(), 0.0);
  return sum / static_cast<double>(acc.n_steps() * acc.n_users());
}

}  // namespace

double reliability(const MetricAccumulator& acc) {
  require_steps(acc, 1, "reliability");
  return fraction_at_least(acc, acc.reliability_threshold_db());
}

double accuracy(const MetricAccumulator& acc) {
  require_steps(acc, 1, "accuracy");
  return fraction_at_least(acc, acc.accuracy_threshold_db());
}

double stability_score(const MetricAccumulator& acc) {
  require_steps(acc, 2, "stability_score");
  const auto& rec = acc.records();
  const double k = static_cast<double>(acc.n_users());
  double total = 0.0;
  for (std::size_t t = 1; t < rec.size(); ++t) {
    double fluctuation = 0.0;
    for (std::size_t u = 0; u < acc.n_users(); ++u) fluctuation += std::abs(rec[t].snr_db[u] - rec[t - 1].snr_db[u]);
    total += static_cast<double>(rec[t].n_switches) / k + 0.1 * fluctuation / k;
  }
  return total / static_cast<double>(rec.size() - 1);
}

double service_interruptions(const MetricAccumulator& acc) {
  require_steps(acc, 2, "service_interruptions");
  const auto& rec = acc.records();
  const double thr = acc.reliability_threshold_db();
  std::size_t events = 0;
  for (std::size_t t = 1; t < rec.size(); ++t) {
    for (std::size_t u = 0; u < acc.n_users(); ++u) {
      events += (rec[t - 1].snr_db[u] >= thr && rec[t].snr_db[u] < thr) ? 1 : 0;
    }
  }
  return static_cast<double>(events) / static_cast<double>(acc.n_users());
}

double mean_snr_db(const MetricAccumulator& acc) {
  require_steps(acc, 1, "mean_snr_db");
  return mean_of(acc, &StepRecord::snr_db);
}

double mean_throughput_mbps(const MetricAccumulator& acc) {
  require_steps(acc, 1, "mean_throughput_mbps");
  return mean_of(acc, &StepRecord::throughput_mbps);
}

double blocked_fraction(const MetricAccumulator& acc) {
  require_steps(acc, 1, "blocked_fraction");
  std::size_t blocked = 0;
  for (const auto& r : acc.records()) blocked += static_cast<std::size_t>(std::count(r.blocked.begin(), r.blocked.end(), true));
  return static_cast<double>(blocked) / static_cast<double>(acc.n_steps() * acc.n_users());
}

RunSummary summarize(const MetricAccumulator& acc, std::uint64_t seed, const std::string& agent_name,
                     const std::string& config_hash) {
  require_steps(acc, 2, "summarize");
  RunSummary s;
  s.mean_snr_db = mean_snr_db(acc);
  s.mean_throughput_mbps = mean_throughput_mbps(acc);
  s.reliability_fraction = reliability(acc);
  s.accuracy_fraction = accuracy(acc);
  s.coverage_fraction = s.reliability_fraction;
  s.total_switches = acc.total_switches();
  s.switch_rate_per_user_step =
      static_cast<double>(s.total_switches) / static_cast<double>(acc.n_users() * acc.n_steps());
  s.stability_score = stability_score(acc);
  s.interruptions_per_user = service_interruptions(acc);
  s.blocked_fraction = blocked_fraction(acc);
  s.n_users = acc.n_users();
  s.n_steps = acc.n_steps();
  s.seed = seed;
  s.agent_name = agent_name;
  s.config_hash = config_hash;
  return s;
}

namespace {

json to_json_value(const RunSummary& s) {
  return json{{"agent_name", s.agent_name},
              {"seed", s.seed},
              {"config_hash", s.config_hash},
              {"n_users", s.n_users},
              {"n_steps", s.n_steps},
              {"mean_snr_db", s.mean_snr_db},
              {"mean_throughput_mbps", s.mean_throughput_mbps},
              {"reliability_fraction", s.reliability_fraction},
              {"accuracy_fraction", s.accuracy_fraction},
              {"coverage_fraction", s.coverage_fraction},
              {"total_switches", s.total_switches},
              {"switch_rate_per_user_step", s.switch_rate_per_user_step},
              {"stability_score", s.stability_score},
              {"interruptions_per_user", s.interruptions_per_user},
              {"blocked_fraction", s.blocked_fraction}};
}

}  // namespace

std::string summary_to_json(const RunSummary& summary) { return to_json_value(summary).dump(2) + "\n"; }

RunSummary summary_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunSummary s;
  s.agent_name = j.at("agent_name").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.config_hash = j.at("config_hash").get<std::string>();
  s.n_users = j.at("n_users").get<std::size_t>();
  s.n_steps = j.at("n_steps").get<std::size_t>();
  s.mean_snr_db = j.at("mean_snr_db").get<double>();
  s.mean_throughput_mbps = j.at("mean_throughput_mbps").get<double>();
  s.reliability_fraction = j.at("reliability_fraction").get<double>();
  s.accuracy_fraction = j.at("accuracy_fraction").get<double>();
  s.coverage_fraction = j.at("coverage_fraction").get<double>();
  s.total_switches = j.at("total_switches").get<std::size_t>();
  s.switch_rate_per_user_step = j.at("switch_rate_per_user_step").get<double>();
  s.stability_score = j.at("stability_score").get<double>();
  s.interruptions_per_user = j.at("interruptions_per_user").get<double>();
  s.blocked_fraction = j.at("blocked_fraction").get<double>();
  return s;
}

void write_step_csv(const std::filesystem::path& path, const MetricAccumulator& acc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write step log: " + path.string());
  out << "step,mean_snr_db,mean_throughput_mbps,n_switches,reliability_so_far,blocked_fraction\n";
  const double k = static_cast<double>(acc.n_users());
  std::size_t reliable = 0;
  std::size_t t = 0;
  for (const auto& r : acc.records()) {
    ++t;
    double snr = 0.0;
    double rate = 0.0;
    std::size_t blocked = 0;
    for (std::size_t u = 0; u < acc.n_users(); ++u) {
      snr += r.snr_db[u];
      rate += r.throughput_mbps[u];
      reliable += r.snr_db[u] >= acc.reliability_threshold_db() ? 1 : 0;
      blocked += r.blocked[u] ? 1 : 0;
    }
    out << t << ',' << detail::fmt_double(snr / k) << ',' << detail::fmt_double(rate / k) << ',' << r.n_switches
        << ',' << detail::fmt_double(static_cast<double>(reliable) / (k * static_cast<double>(t))) << ','
        << detail::fmt_double(static_cast<double>(blocked) / k) << '\n';
  }
}

void write_summary_json(const std::filesystem::path& path, const RunSummary& summary) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write summary: " + path.string());
  out << summary_to_json(summary);
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

double summary_metric(const RunSummary& s, const std::string& name) {
  if (name == "stability_score") return s.stability_score;
  if (name == "mean_snr_db") return s.mean_snr_db;
  if (name == "mean_throughput_mbps") return s.mean_throughput_mbps;
  if (name == "reliability_fraction") return s.reliability_fraction;
  if (name == "accuracy_fraction") return s.accuracy_fraction;
  if (name == "coverage_fraction") return s.coverage_fraction;
  if (name == "interruptions_per_user") return s.interruptions_per_user;
  if (name == "switch_rate_per_user_step") return s.switch_rate_per_user_step;
  throw std::invalid_argument("unknown summary metric: " + name);
}

namespace {

// Metrics where a larger value is better; ranking keeps the largest.
bool higher_is_better(const std::string& metric) {
  return metric == "mean_snr_db" || metric == "mean_throughput_mbps" || metric == "reliability_fraction" ||
         metric == "accuracy_fraction" || metric == "coverage_fraction";
}

ComparisonRow aggregate(const std::string& label, const std::vector<const RunSummary*>& runs) {
  auto collect = [&runs](double RunSummary::*field) {
    std::vector<double> v;
    for (const auto* r : runs) v.push_back(r->*field);
    return mean_std(v);
  };
  ComparisonRow row;
  row.label = label;
  row.n_runs = runs.size();
  row.stability_score = collect(&RunSummary::stability_score);
  row.mean_snr_db = collect(&RunSummary::mean_snr_db);
  row.coverage_fraction = collect(&RunSummary::coverage_fraction);
  row.interruptions_per_user = collect(&RunSummary::interruptions_per_user);
  row.mean_throughput_mbps = collect(&RunSummary::mean_throughput_mbps);
  row.accuracy_fraction = collect(&RunSummary::accuracy_fraction);
  row.switch_rate_per_user_step = collect(&RunSummary::switch_rate_per_user_step);
  return row;
}

}  // namespace

std::vector<ComparisonRow> compare_runs(const std::vector<RunSummary>& runs, std::size_t top_k,
                                        const std::string& rank_metric,
                                        const std::vector<std::string>& top_k_agents) {
  std::vector<std::string> order;
  for (const auto& r : runs) {
    if (std::find(order.begin(), order.end(), r.agent_name) == order.end()) order.push_back(r.agent_name);
  }
  std::vector<ComparisonRow> rows;
  for (const auto& agent : order) {
    std::vector<const RunSummary*> group;
    for (const auto& r : runs) {
      if (r.agent_name == agent) group.push_back(&r);
    }
    rows.push_back(aggregate(agent, group));

    const bool wants_top_k =
        std::find(top_k_agents.begin(), top_k_agents.end(), agent) != top_k_agents.end();
    if (wants_top_k && top_k > 0 && top_k < group.size()) {
      const bool descending = higher_is_better(rank_metric);
      std::stable_sort(group.begin(), group.end(), [&](const RunSummary* a, const RunSummary* b) {
        const double va = summary_metric(*a, rank_metric);
        const double vb = summary_metric(*b, rank_metric);
        return descending ? va > vb : va < vb;
      });
      group.resize(top_k);
      rows.push_back(aggregate(agent + " (top-" + std::to_string(top_k) + " by " + rank_metric + ")", group));
    }
  }
  return rows;
}

void write_comparison_csv(const std::filesystem::path& path, const std::vector<ComparisonRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write comparison: " + path.string());
  out << "agent,n_runs,stability_score_mean,stability_score_std,mean_snr_db_mean,mean_snr_db_std,"
         "coverage_mean,coverage_std,interruptions_mean,interruptions_std,throughput_mbps_mean,"
         "throughput_mbps_std,accuracy_mean,accuracy_std,switch_rate_mean,switch_rate_std\n";
  for (const auto& r : rows) {
    out << '"' << r.label << '"' << ',' << r.n_runs;
    for (const MeanStd* m : {&r.stability_score, &r.mean_snr_db, &r.coverage_fraction, &r.interruptions_per_user,
                             &r.mean_throughput_mbps, &r.accuracy_fraction, &r.switch_rate_per_user_step}) {
      out << ',' << detail::fmt_double(m->mean) << ',' << detail::fmt_double(m->stddev);
    }
    out << '\n';
  }
}

std::string comparison_markdown(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out << "| Metric |";
  for (const auto& r : rows) out << ' ' << r.label << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < rows.size(); ++i) out << "---|";
  out << '\n';
  auto line = [&](const char* name, MeanStd ComparisonRow::*field, double scale, int digits, const char* unit) {
    out << "| " << name << " |";
    for (const auto& r : rows) {
      const MeanStd& m = r.*field;
      out << ' ' << detail::fmt_fixed(m.mean * scale, digits) << unit << " ± "
          << detail::fmt_fixed(m.stddev * scale, digits) << " |";
    }
    out << '\n';
  };
  line("Stability Score (lower is better)", &ComparisonRow::stability_score, 1.0, 3, "");
  line("Avg SNR (dB)", &ComparisonRow::mean_snr_db, 1.0, 1, "");
  line("Coverage Ratio", &ComparisonRow::coverage_fraction, 100.0, 1, "%");
  line("Service Interruptions (per user)", &ComparisonRow::interruptions_per_user, 1.0, 2, "");
  line("Throughput (Mbps)", &ComparisonRow::mean_throughput_mbps, 1.0, 1, "");
  line("Accuracy (>= 14 dB)", &ComparisonRow::accuracy_fraction, 100.0, 1, "%");
  line("Switch rate (per user-step)", &ComparisonRow::switch_rate_per_user_step, 1.0, 4, "");
  return out.str();
}

}  // namespace beamsw
