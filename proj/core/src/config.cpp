#include "beamsw/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>
#include <utility>

#include "text.hpp"

namespace beamsw {

void ExperimentConfig::apply_blockage_regime(BlockageRegime regime) {
  blockage_regime = regime;
  env.blockage = BlockageParams::for_regime(regime);
}

std::string to_string(BlockageRegime regime) { return regime == BlockageRegime::kHigh ? "high" : "default"; }

BlockageRegime parse_blockage_regime(const std::string& name) {
  if (name == "default") return BlockageRegime::kDefault;
  if (name == "high") return BlockageRegime::kHigh;
  throw std::invalid_argument("unknown blockage regime '" + name + "' (expected default or high)");
}

std::string to_string(ChannelMode mode) { return mode == ChannelMode::kPureRayleigh ? "pure-rayleigh" : "rician"; }

ChannelMode parse_channel_mode(const std::string& name) {
  if (name == "rician") return ChannelMode::kRician;
  if (name == "pure-rayleigh") return ChannelMode::kPureRayleigh;
  throw std::invalid_argument("unknown channel mode '" + name + "' (expected rician or pure-rayleigh)");
}

Preset parse_preset(const std::string& name) {
  if (name == "paper") return Preset::kPaper;
  if (name == "desk") return Preset::kDesk;
  throw std::invalid_argument("unknown preset '" + name + "' (expected paper or desk)");
}

ExperimentConfig make_preset(Preset preset) {
  ExperimentConfig c;
  c.apply_blockage_regime(BlockageRegime::kDefault);
  if (preset == Preset::kPaper) {
    c.top_k = 3;
    return c;
  }
  c.env.n_users = 10;
  c.env.n_antennas = 16;
  c.env.n_beams = 16;
  c.t_train = 5000;
  c.t_eval = 500;
  c.seeds = {1, 2, 3};
  c.top_k = 0;
  // Narrower trunk and batch so a full desk experiment fits in minutes on one core.
  c.dqn.network.hidden = {128, 128, 64};
  c.dqn.batch_size = 128;
  // Training is 4x shorter than the full-scale preset, so epsilon decays 4x faster and
  // still reaches its floor at the same fraction (~44%) of training.
  c.dqn.epsilon_decay = 0.9988;
  return c;
}

namespace {

// Every configurable field, in file order. Drives parsing, emission,
// canonicalization and the unknown-key check.
template <typename Config, typename F>
void for_each_field(Config& c, F&& f) {
  f("scenario", "n_users", c.env.n_users);
  f("scenario", "n_antennas", c.env.n_antennas);
  f("scenario", "n_beams", c.env.n_beams);
  f("scenario", "arena_size_m", c.env.arena_size_m);
  f("scenario", "bs_height_m", c.env.bs_height_m);
  f("scenario", "ue_height_m", c.env.ue_height_m);
  f("scenario", "min_bs_distance_m", c.env.min_bs_distance_m);
  f("scenario", "speed_min_mps", c.env.speed_min_mps);
  f("scenario", "speed_max_mps", c.env.speed_max_mps);
  f("scenario", "dt_s", c.env.dt_s);
  f("scenario", "carrier_freq_hz", c.env.link.carrier_freq_hz);
  f("scenario", "tx_power_dbm", c.env.link.tx_power_dbm);
  f("scenario", "bandwidth_hz", c.env.link.bandwidth_hz);
  f("scenario", "noise_figure_db", c.env.link.noise_figure_db);
  f("scenario", "blockage_attenuation_db", c.env.link.blockage_attenuation_db);
  f("scenario", "blockage", c.blockage_regime);
  f("scenario", "channel_mode", c.env.channel.mode);
  f("scenario", "rician_k_db", c.env.channel.rician_k_db);
  f("scenario", "antenna_spacing_wavelengths", c.env.channel.antenna_spacing_wavelengths);

  f("agent", "gamma", c.dqn.gamma);
  f("agent", "batch_size", c.dqn.batch_size);
  f("agent", "target_sync_period", c.dqn.target_sync_period);
  f("agent", "updates_per_step", c.dqn.updates_per_step);
  f("agent", "epsilon_start", c.dqn.epsilon_start);
  f("agent", "epsilon_floor", c.dqn.epsilon_floor);
  f("agent", "epsilon_decay", c.dqn.epsilon_decay);
  f("agent", "learning_rate", c.dqn.adam.learning_rate);
  f("agent", "adam_beta1", c.dqn.adam.beta1);
  f("agent", "adam_beta2", c.dqn.adam.beta2);
  f("agent", "adam_epsilon", c.dqn.adam.epsilon);
  f("agent", "hidden", c.dqn.network.hidden);
  f("agent", "dropout", c.dqn.network.dropout);
  f("agent", "bn_momentum", c.dqn.network.bn_momentum);
  f("agent", "bn_epsilon", c.dqn.network.bn_epsilon);
  f("agent", "buffer_capacity", c.dqn.buffer_capacity);
  f("agent", "per_alpha", c.dqn.per_alpha);
  f("agent", "per_beta_start", c.dqn.per_beta_start);
  f("agent", "per_beta_end", c.dqn.per_beta_end);
  f("agent", "priority_epsilon", c.dqn.priority_epsilon);
  f("agent", "ucb_c", c.ucb_c);
  f("agent", "ucb_window", c.ucb_window);

  f("reward", "w_stab", c.env.reward.w_stab);
  f("reward", "w_switch", c.env.reward.w_switch);
  f("reward", "snr_clip_db", c.env.reward.snr_clip_db);
  f("reward", "snr_divisor", c.env.reward.snr_divisor);
  f("reward", "bonus", c.env.reward.bonus);
  f("reward", "snr_threshold_db", c.env.reward.snr_threshold_db);

  f("run", "t_train", c.t_train);
  f("run", "t_eval", c.t_eval);
  f("run", "seeds", c.seeds);
  f("run", "out_dir", c.out_dir);
  f("run", "top_k", c.top_k);
  f("run", "top_k_metric", c.top_k_metric);
  f("run", "agents", c.agents);
}

// Fields that select or place runs rather than define them.
bool excluded_from_hash(const std::string& section, const std::string& key) {
  return section == "run" && (key == "out_dir" || key == "seeds" || key == "agents");
}

template <typename T>
void read_value(const YAML::Node& node, T& out) {
  using V = std::remove_cvref_t<T>;
  if constexpr (std::is_same_v<V, BlockageRegime>) {
    out = parse_blockage_regime(node.as<std::string>());
  } else if constexpr (std::is_same_v<V, ChannelMode>) {
    out = parse_channel_mode(node.as<std::string>());
  } else if constexpr (std::is_same_v<V, std::size_t>) {
    const auto v = node.as<long long>();
    if (v < 0) throw std::invalid_argument("must be non-negative");
    out = static_cast<std::size_t>(v);
  } else if constexpr (std::is_same_v<V, std::vector<std::size_t>>) {
    if (!node.IsSequence()) throw std::invalid_argument("must be a list");
    out.clear();
    for (const auto& item : node) {
      const auto v = item.as<long long>();
      if (v < 0) throw std::invalid_argument("entries must be non-negative");
      out.push_back(static_cast<std::size_t>(v));
    }
  } else if constexpr (std::is_same_v<V, std::vector<std::string>>) {
    if (!node.IsSequence()) throw std::invalid_argument("must be a list");
    out.clear();
    for (const auto& item : node) out.push_back(item.as<std::string>());
  } else {
    out = node.as<V>();
  }
}

template <typename T>
std::string render_value(const T& value) {
  using V = std::remove_cvref_t<T>;
  if constexpr (std::is_same_v<V, BlockageRegime> || std::is_same_v<V, ChannelMode>) {
    return to_string(value);
  } else if constexpr (std::is_same_v<V, double>) {
    return detail::fmt_double(value);
  } else if constexpr (std::is_same_v<V, std::string>) {
    return value;
  } else if constexpr (std::is_same_v<V, std::vector<std::size_t>> || std::is_same_v<V, std::vector<std::string>>) {
    std::string out = "[";
    for (std::size_t i = 0; i < value.size(); ++i) {
      if (i > 0) out += ",";
      if constexpr (std::is_same_v<V, std::vector<std::string>>) {
        out += value[i];
      } else {
        out += std::to_string(value[i]);
      }
    }
    return out + "]";
  } else {
    return std::to_string(value);
  }
}

template <typename T>
void emit_value(YAML::Emitter& out, const T& value) {
  using V = std::remove_cvref_t<T>;
  if constexpr (std::is_same_v<V, BlockageRegime> || std::is_same_v<V, ChannelMode>) {
    out << to_string(value);
  } else if constexpr (std::is_same_v<V, double>) {
    if (std::isinf(value)) {
      out << (value > 0 ? ".inf" : "-.inf");
    } else {
      out << detail::fmt_double(value);
    }
  } else if constexpr (std::is_same_v<V, std::vector<std::size_t>> || std::is_same_v<V, std::vector<std::string>>) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : value) out << v;
    out << YAML::EndSeq;
  } else {
    out << value;
  }
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    std::size_t used = 0;
    const unsigned long long v = std::stoull(item, &used);
    if (used != item.size()) throw std::invalid_argument("invalid seed '" + item + "'");
    seeds.push_back(v);
  }
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  return seeds;
}

std::vector<std::string> parse_agent_list(const std::string& text) {
  std::vector<std::string> agents;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    if (std::find(kAllAgents.begin(), kAllAgents.end(), item) == kAllAgents.end()) {
      throw std::invalid_argument("unknown agent '" + item + "'");
    }
    agents.push_back(item);
  }
  if (agents.empty()) throw std::invalid_argument("agent list is empty");
  return agents;
}

ExperimentConfig parse_config_string(const std::string& text, const ExperimentConfig& base) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<file>", std::string("malformed YAML: ") + e.what());
  }
  ExperimentConfig c = base;
  if (!root || root.IsNull()) {
    validate_config(c);
    return c;
  }
  if (!root.IsMap()) throw ConfigError("<file>", "top level must be a mapping of sections");

  std::set<std::string> sections;
  std::set<std::pair<std::string, std::string>> known;
  for_each_field(c, [&](const char* s, const char* k, auto&) {
    sections.insert(s);
    known.emplace(s, k);
  });

  for (const auto& sec : root) {
    const auto name = sec.first.as<std::string>();
    if (!sections.count(name)) throw ConfigError(name, "unknown section");
    if (sec.second.IsNull()) continue;
    if (!sec.second.IsMap()) throw ConfigError(name, "section must be a mapping");
    for (const auto& kv : sec.second) {
      const auto key = kv.first.as<std::string>();
      if (!known.count({name, key})) throw ConfigError(name + "." + key, "unknown key");
    }
  }

  for_each_field(c, [&](const char* s, const char* k, auto& field) {
    const YAML::Node sec = root[s];
    if (!sec || !sec.IsMap()) return;
    const YAML::Node node = sec[k];
    if (!node) return;
    try {
      read_value(node, field);
    } catch (const std::exception& e) {
      throw ConfigError(std::string(s) + "." + k, e.what());
    }
  });
  c.apply_blockage_regime(c.blockage_regime);
  validate_config(c);
  return c;
}

ExperimentConfig parse_config(const std::filesystem::path& path, const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), base);
}

std::string serialize_config(const ExperimentConfig& config) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  std::string current;
  for_each_field(config, [&](const char* s, const char* k, const auto& field) {
    if (current != s) {
      if (!current.empty()) out << YAML::EndMap;
      current = s;
      out << YAML::Key << s << YAML::Value << YAML::BeginMap;
    }
    out << YAML::Key << k << YAML::Value;
    emit_value(out, field);
  });
  out << YAML::EndMap << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string canonical_config(const ExperimentConfig& config) {
  std::vector<std::string> lines;
  for_each_field(config, [&](const char* s, const char* k, const auto& field) {
    if (excluded_from_hash(s, k)) return;
    lines.push_back(std::string(s) + "." + k + "=" + render_value(field));
  });
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::uint64_t h = fnv1a64(canonical_config(config));
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15, shift = 0; i >= 0; --i, shift += 4) out[static_cast<std::size_t>(i)] = kHex[(h >> shift) & 0xF];
  return out;
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const char* field, const std::string& msg) { throw ConfigError(field, msg); };
  if (c.env.n_users == 0) fail("scenario.n_users", "must be >= 1");
  if (c.env.n_antennas == 0) fail("scenario.n_antennas", "must be >= 1");
  if (c.env.n_beams == 0 || c.env.n_beams > c.env.n_antennas) {
    fail("scenario.n_beams", "must be in [1, n_antennas] for the DFT codebook");
  }
  if (!(c.env.arena_size_m > 0.0)) fail("scenario.arena_size_m", "must be > 0");
  if (!(c.env.dt_s > 0.0)) fail("scenario.dt_s", "must be > 0");
  if (!(c.env.link.bandwidth_hz > 0.0)) fail("scenario.bandwidth_hz", "must be > 0");
  if (!(c.env.link.blockage_attenuation_db >= 0.0)) fail("scenario.blockage_attenuation_db", "must be >= 0");
  if (!(c.env.channel.antenna_spacing_wavelengths > 0.0)) {
    fail("scenario.antenna_spacing_wavelengths", "must be > 0");
  }
  if (!(c.ucb_c >= 0.0)) fail("agent.ucb_c", "must be >= 0");
  if (c.dqn.network.hidden.empty()) fail("agent.hidden", "needs at least one layer");
  if (c.t_eval < 2) fail("run.t_eval", "must be >= 2");
  if (c.seeds.empty()) fail("run.seeds", "must not be empty");
  if (c.agents.empty()) fail("run.agents", "must not be empty");
  for (const auto& a : c.agents) {
    if (std::find(kAllAgents.begin(), kAllAgents.end(), a) == kAllAgents.end()) {
      fail("run.agents", "unknown agent '" + a + "'");
    }
  }
  try {
    (void)summary_metric(RunSummary{}, c.top_k_metric);
  } catch (const std::invalid_argument& e) {
    fail("run.top_k_metric", e.what());
  }
  try {
    c.env.validate();
  } catch (const std::invalid_argument& e) {
    fail("scenario", e.what());
  }
  try {
    c.dqn.validate();
  } catch (const std::invalid_argument& e) {
    fail("agent", e.what());
  }
}

}  // namespace beamsw
