#include "beamsw/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace beamsw {

BlockageParams BlockageParams::for_regime(BlockageRegime regime) {
  if (regime == BlockageRegime::kHigh) return {0.90, 0.10};
  return {0.25, 0.08};
}

double BlockageParams::stationary_blocked_fraction() const {
  const double denom = p_become_blocked + 1.0 - p_stay_blocked;
  return denom > 0.0 ? p_become_blocked / denom : 1.0;
}

void BlockageParams::validate() const {
  auto in_unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!in_unit(p_stay_blocked)) throw std::invalid_argument("p_stay_blocked must be in [0,1]");
  if (!in_unit(p_become_blocked)) throw std::invalid_argument("p_become_blocked must be in [0,1]");
}

void RewardParams::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"w_stab", w_stab},       {"w_switch", w_switch},        {"snr_clip_db", snr_clip_db},
      {"snr_divisor", snr_divisor}, {"bonus", bonus}, {"snr_threshold_db", snr_threshold_db}};
  for (const auto& [name, value] : fields) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw std::invalid_argument(std::string("reward.") + name + " must be finite and >= 0");
    }
  }
  if (snr_divisor == 0.0) throw std::invalid_argument("reward.snr_divisor must be > 0");
}

void EnvConfig::validate() const {
  if (n_users == 0) throw std::invalid_argument("n_users must be >= 1");
  if (n_antennas == 0) throw std::invalid_argument("n_antennas must be >= 1");
  if (n_beams == 0 || n_beams > n_antennas) {
    throw std::invalid_argument("n_beams must be in [1, n_antennas]");
  }
  if (!(arena_size_m > 0.0)) throw std::invalid_argument("arena_size_m must be > 0");
  if (!(min_bs_distance_m >= 0.0) || min_bs_distance_m >= arena_size_m / 2.0) {
    throw std::invalid_argument("min_bs_distance_m must be in [0, arena_size_m / 2)");
  }
  if (!(speed_min_mps > 0.0) || speed_max_mps < speed_min_mps) {
    throw std::invalid_argument("speed range must satisfy 0 < speed_min_mps <= speed_max_mps");
  }
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be > 0");
  if (!(bs_height_m > 0.0) || !(ue_height_m > 0.0)) {
    throw std::invalid_argument("antenna heights must be > 0");
  }
  link.validate();
  channel.validate();
  blockage.validate();
  reward.validate();
}

double relative_angle(Vec2 bs, Vec2 position) {
  const double dx = position.x - bs.x;
  const double dy = position.y - bs.y;
  if (dx == 0.0 && dy == 0.0) return 0.0;
  return std::atan2(dy, std::abs(dx));
}

namespace {

Vec2 uniform_point(double size, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, size);
  const double x = u(rng);
  const double y = u(rng);
  return {x, y};
}

double uniform_speed(const EnvConfig& config, Rng& rng) {
  return std::uniform_real_distribution<double>(config.speed_min_mps, config.speed_max_mps)(rng);
}

void update_geometry(UserState& user, const EnvConfig& config) {
  const Vec2 bs = config.bs_position();
  user.distance_m = std::hypot(user.position.x - bs.x, user.position.y - bs.y);
  user.angle_rad = relative_angle(bs, user.position);
}

void aim_at_waypoint(UserState& user) {
  const double dx = user.waypoint.x - user.position.x;
  const double dy = user.waypoint.y - user.position.y;
  const double dist = std::hypot(dx, dy);
  if (dist > 0.0) {
    user.velocity = {user.speed_mps * dx / dist, user.speed_mps * dy / dist};
  } else {
    user.velocity = {0.0, 0.0};
  }
}

template <typename T, std::size_t N>
void push_history(std::array<T, N>& history, T value) {
  std::shift_left(history.begin(), history.end(), 1);
  history.back() = value;
}

}  // namespace

UserState mobility_step(const UserState& user, const EnvConfig& config, Rng& rng) {
  UserState next = user;
  const double travel = user.speed_mps * config.dt_s;
  const double dx = user.waypoint.x - user.position.x;
  const double dy = user.waypoint.y - user.position.y;
  const double remaining = std::hypot(dx, dy);
  if (remaining <= travel) {
    next.position = user.waypoint;
    next.waypoint = uniform_point(config.arena_size_m, rng);
    next.speed_mps = uniform_speed(config, rng);
  } else {
    next.position = {user.position.x + travel * dx / remaining,
                     user.position.y + travel * dy / remaining};
  }
  next.position.x = std::clamp(next.position.x, 0.0, config.arena_size_m);
  next.position.y = std::clamp(next.position.y, 0.0, config.arena_size_m);
  aim_at_waypoint(next);
  update_geometry(next, config);
  return next;
}

bool blockage_step(bool blocked, const BlockageParams& params, Rng& rng) {
  const double p = blocked ? params.p_stay_blocked : params.p_become_blocked;
  return uniform01(rng) < p;
}

Observation build_observation(const UserState& user, const EnvConfig& config) {
  Observation obs;
  auto& f = obs.features;
  f[0] = std::clamp(user.angle_rad / (std::numbers::pi / 2.0), -1.0, 1.0);
  f[1] = std::clamp(user.distance_m / config.arena_size_m, 0.0, 1.0);
  f[2] = std::clamp(user.prev_snr_db, 0.0, 60.0) / 60.0;
  f[3] = user.blocked ? 1.0 : 0.0;
  double blocked_count = 0.0;
  for (bool b : user.blockage_history) blocked_count += b ? 1.0 : 0.0;
  f[4] = blocked_count / static_cast<double>(kBlockageHistoryLength);
  const double trend = (user.snr_history_db.back() - user.snr_history_db.front()) / 20.0 + 0.5;
  f[5] = std::clamp(trend, 0.0, 1.0);
  f[6] = static_cast<double>(std::min(user.beam_persistence, 50)) / 50.0;
  f[7] = std::clamp(user.speed_mps / config.speed_max_mps, 0.0, 1.0);
  return obs;
}

double f_snr(double snr_db, const RewardParams& params) {
  const double bonus = snr_db > params.snr_threshold_db ? params.bonus : 0.0;
  return std::min(snr_db, params.snr_clip_db) / params.snr_divisor + bonus;
}

double compute_reward(double snr_now_db, double snr_prev_db, std::size_t n_switches,
                      std::size_t k_users, const RewardParams& params) {
  if (k_users == 0) throw std::invalid_argument("compute_reward: k_users must be >= 1");
  return f_snr(snr_now_db, params) - params.w_stab * std::abs(snr_now_db - snr_prev_db) -
         params.w_switch * (static_cast<double>(n_switches) / static_cast<double>(k_users));
}

Environment::Environment(EnvConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      codebook_(make_dft_codebook(config_.n_antennas, config_.n_beams)),
      rng_(seed) {
  config_.validate();
  const Vec2 bs = config_.bs_position();
  users_.resize(config_.n_users);
  for (auto& user : users_) {
    do {
      user.position = uniform_point(config_.arena_size_m, rng_);
    } while (std::hypot(user.position.x - bs.x, user.position.y - bs.y) < config_.min_bs_distance_m);
    user.waypoint = uniform_point(config_.arena_size_m, rng_);
    user.speed_mps = uniform_speed(config_, rng_);
    aim_at_waypoint(user);
    update_geometry(user, config_);
  }
  h_eff_.resize(config_.n_users);
  heuristic_.resize(config_.n_users);
  refresh_channels();
}

void Environment::refresh_channels() {
  for (std::size_t k = 0; k < users_.size(); ++k) {
    const UserState& user = users_[k];
    const ChannelVector h = sample_fading(rng_, config_.channel, user.angle_rad, config_.n_antennas);
    const double pl = path_loss_umi_db(user.distance_m, config_.bs_height_m, config_.ue_height_m,
                                       config_.link.carrier_freq_hz);
    h_eff_[k] = effective_channel(h, pl);
    heuristic_[k] =
        heuristic_beam_index(user.angle_rad, codebook_, config_.channel.antenna_spacing_wavelengths);
  }
}

void Environment::begin_step() {
  if (pending_) return;
  for (auto& user : users_) user = mobility_step(user, config_, rng_);
  for (auto& user : users_) user.blocked = blockage_step(user.blocked, config_.blockage, rng_);
  refresh_channels();
  pending_ = true;
}

StepResult Environment::step(std::span<const std::size_t> actions) {
  const std::size_t k_users = users_.size();
  if (actions.size() != k_users) {
    throw std::invalid_argument("env step: expected " + std::to_string(k_users) + " actions, got " +
                                std::to_string(actions.size()));
  }
  for (std::size_t a : actions) {
    if (a >= n_beams()) {
      throw std::invalid_argument("env step: beam index " + std::to_string(a) + " out of range");
    }
  }
  begin_step();

  StepResult out;
  out.per_user_snr_db.resize(k_users);
  out.per_user_reward.resize(k_users);
  out.per_user_throughput_mbps.resize(k_users);
  out.per_user_blocked.resize(k_users);
  out.per_user_switched.resize(k_users);
  out.per_user_prev_snr_db.resize(k_users);

  for (std::size_t k = 0; k < k_users; ++k) {
    const UserState& user = users_[k];
    out.per_user_snr_db[k] = snr_for(k, actions[k]);
    out.per_user_throughput_mbps[k] =
        throughput_mbps(out.per_user_snr_db[k], config_.link.bandwidth_hz);
    out.per_user_blocked[k] = user.blocked;
    // The first assignment is not a switch.
    const bool switched = user.current_beam.has_value() && *user.current_beam != actions[k];
    out.per_user_switched[k] = switched;
    out.n_switches += switched ? 1 : 0;
    out.per_user_prev_snr_db[k] = user.has_prev_snr ? user.prev_snr_db : out.per_user_snr_db[k];
  }

  for (std::size_t k = 0; k < k_users; ++k) {
    out.per_user_reward[k] = compute_reward(out.per_user_snr_db[k], out.per_user_prev_snr_db[k],
                                            out.n_switches, k_users, config_.reward);
    UserState& user = users_[k];
    push_history(user.blockage_history, user.blocked);
    push_history(user.snr_history_db, out.per_user_snr_db[k]);
    if (user.current_beam == actions[k]) {
      ++user.beam_persistence;
    } else {
      user.beam_persistence = 1;
      user.current_beam = actions[k];
    }
    user.prev_snr_db = out.per_user_snr_db[k];
    user.has_prev_snr = true;
  }

  pending_ = false;
  ++steps_;
  return out;
}

void Environment::advance_exogenous(std::size_t n_steps) {
  for (std::size_t i = 0; i < n_steps; ++i) {
    begin_step();
    for (auto& user : users_) push_history(user.blockage_history, user.blocked);
    pending_ = false;
    ++steps_;
  }
}

double Environment::snr_for(std::size_t user, std::size_t beam) const {
  return snr_for(user, beam, true);
}

double Environment::snr_for(std::size_t user, std::size_t beam, bool apply_blockage) const {
  const bool blocked = apply_blockage && users_.at(user).blocked;
  return snr_db(h_eff_[user], codebook_.beam(beam), config_.link, blocked, beam == heuristic_[user]);
}

Eigen::MatrixXd Environment::oracle_snr_table() const {
  const auto k_users = static_cast<Eigen::Index>(users_.size());
  const auto n_b = static_cast<Eigen::Index>(n_beams());
  Eigen::MatrixXd table(k_users, n_b);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    for (Eigen::Index b = 0; b < n_b; ++b) {
      table(k, b) = snr_for(static_cast<std::size_t>(k), static_cast<std::size_t>(b));
    }
  }
  return table;
}

std::vector<Observation> Environment::observations() const {
  std::vector<Observation> out;
  out.reserve(users_.size());
  for (const auto& user : users_) out.push_back(build_observation(user, config_));
  return out;
}

}  // namespace beamsw
