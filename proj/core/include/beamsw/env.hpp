#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "beamsw/phy.hpp"
#include "beamsw/rng.hpp"

namespace beamsw {

inline constexpr std::size_t kObservationDim = 8;
inline constexpr std::size_t kBlockageHistoryLength = 5;
inline constexpr std::size_t kSnrHistoryLength = 3;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class BlockageRegime { kDefault, kHigh };

/// Two-state Markov chain over {unblocked, blocked} for the direct path.
struct BlockageParams {
  double p_stay_blocked = 0.25;     // P(blocked -> blocked)
  double p_become_blocked = 0.08;   // P(unblocked -> blocked)

  static BlockageParams for_regime(BlockageRegime regime);
  /// Long-run blocked probability P_UB / (P_UB + 1 - P_BB).
  double stationary_blocked_fraction() const;
  void validate() const;
};

struct RewardParams {
  double w_stab = 2.5;
  double w_switch = 40.0;
  double snr_clip_db = 60.0;
  double snr_divisor = 8.0;
  double bonus = 3.0;
  double snr_threshold_db = 8.0;

  void validate() const;
};

struct EnvConfig {
  std::size_t n_users = 100;
  std::size_t n_antennas = 64;
  std::size_t n_beams = 64;
  double arena_size_m = 500.0;
  double bs_height_m = 10.0;
  double ue_height_m = 1.5;
  double min_bs_distance_m = 5.0;
  double speed_min_mps = 1.0;
  double speed_max_mps = 20.0;
  double dt_s = 0.01;
  LinkBudget link;
  ChannelModelConfig channel;
  BlockageParams blockage;
  RewardParams reward;

  /// The base station sits at the arena center.
  Vec2 bs_position() const { return {arena_size_m / 2.0, arena_size_m / 2.0}; }
  void validate() const;
};

struct UserState {
  Vec2 position;
  Vec2 velocity;
  Vec2 waypoint;
  double speed_mps = 0.0;
  double angle_rad = 0.0;
  double distance_m = 0.0;
  bool blocked = false;
  /// Oldest first, zero padded until warm.
  std::array<bool, kBlockageHistoryLength> blockage_history{};
  std::array<double, kSnrHistoryLength> snr_history_db{};
  std::optional<std::size_t> current_beam;
  int beam_persistence = 0;
  double prev_snr_db = 0.0;
  bool has_prev_snr = false;
};

struct Observation {
  std::array<double, kObservationDim> features{};
};

struct StepResult {
  std::vector<double> per_user_snr_db;
  std::vector<double> per_user_reward;
  std::vector<double> per_user_throughput_mbps;
  std::vector<bool> per_user_blocked;
  std::vector<bool> per_user_switched;
  /// Realized SNR of each user on the previous step (equal to the current
  /// SNR on a user's first step).
  std::vector<double> per_user_prev_snr_db;
  std::size_t n_switches = 0;
};

/// Angle of `position` seen from the BS, in [-pi/2, pi/2], broadside along +x.
/// A ULA cannot tell front from back, so users behind the array mirror.
double relative_angle(Vec2 bs, Vec2 position);

/// Random-waypoint mobility update.
UserState mobility_step(const UserState& user, const EnvConfig& config, Rng& rng);

/// One transition of the blockage chain.
bool blockage_step(bool blocked, const BlockageParams& params, Rng& rng);

Observation build_observation(const UserState& user, const EnvConfig& config);

/// min(snr, clip) / divisor + bonus * [snr > threshold].
double f_snr(double snr_db, const RewardParams& params);

/// Stability-aware per-user reward with the cell-wide switch penalty.
double compute_reward(double snr_now_db, double snr_prev_db, std::size_t n_switches,
                      std::size_t k_users, const RewardParams& params);

/// Multi-user downlink beam selection environment.
///
/// A step is split in two phases so that a full-CSI oracle can look at the
/// realization an action will face: begin_step() advances mobility, the
/// blockage chains and block fading; step() scores the actions against that
/// realization. step() calls begin_step() itself when needed, and the random
/// stream is consumed identically either way.
class Environment {
 public:
  Environment(EnvConfig config, std::uint64_t seed);

  const EnvConfig& config() const { return config_; }
  const Codebook& codebook() const { return codebook_; }
  std::size_t n_users() const { return config_.n_users; }
  std::size_t n_beams() const { return codebook_.n_beams(); }
  std::size_t steps_elapsed() const { return steps_; }
  const std::vector<UserState>& users() const { return users_; }

  void begin_step();
  StepResult step(std::span<const std::size_t> actions);

  /// Advances only the exogenous processes (mobility, blockage, fading) for
  /// agents that have no use for a training phase.
  void advance_exogenous(std::size_t n_steps);

  /// K x N_b SNR table for the current realization. Pure read.
  Eigen::MatrixXd oracle_snr_table() const;
  /// SNR of `user` on `beam` in the current realization.
  double snr_for(std::size_t user, std::size_t beam) const;
  /// Same, optionally ignoring the blockage state (counterfactual).
  double snr_for(std::size_t user, std::size_t beam, bool apply_blockage) const;
  std::size_t heuristic_beam(std::size_t user) const { return heuristic_[user]; }

  std::vector<Observation> observations() const;

 private:
  void refresh_channels();

  EnvConfig config_;
  Codebook codebook_;
  Rng rng_;
  std::vector<UserState> users_;
  std::vector<ChannelVector> h_eff_;
  std::vector<std::size_t> heuristic_;
  bool pending_ = false;
  std::size_t steps_ = 0;
};

}  // namespace beamsw
