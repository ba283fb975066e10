#pragma once

#include <cstddef>
#include <deque>
#include <utility>
#include <vector>

namespace beamsw {

/// Bounded bandit reward derived from a received SNR: clamp(snr, 0, 60) / 60.
double bandit_reward(double snr_db);

/// Independent UCB1 bandits, one per user, over the same set of arms.
/// With `window` > 0 each user's statistics only cover its last `window`
/// pulls (sliding-window UCB); the default 0 is plain UCB1.
class UcbBandits {
 public:
  UcbBandits(std::size_t n_users, std::size_t n_arms, double exploration = 2.0, std::size_t window = 0);

  /// Lowest-index unpulled arm first, then argmax of mean + C sqrt(ln t / n).
  std::size_t select(std::size_t user) const;
  void update(std::size_t user, std::size_t arm, double reward);
  /// The UCB index of one arm (infinite when unpulled).
  double index(std::size_t user, std::size_t arm) const;

  std::size_t n_users() const { return n_users_; }
  std::size_t n_arms() const { return n_arms_; }
  double exploration() const { return exploration_; }
  std::size_t count(std::size_t user, std::size_t arm) const { return counts_[slot(user, arm)]; }
  double mean(std::size_t user, std::size_t arm) const { return means_[slot(user, arm)]; }
  std::size_t total_pulls(std::size_t user) const { return totals_.at(user); }

 private:
  std::size_t slot(std::size_t user, std::size_t arm) const;

  std::size_t n_users_;
  std::size_t n_arms_;
  double exploration_;
  std::size_t window_;
  std::vector<std::size_t> counts_;
  std::vector<double> means_;
  std::vector<std::size_t> totals_;
  std::vector<std::deque<std::pair<std::size_t, double>>> history_;
};

}  // namespace beamsw
