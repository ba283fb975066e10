#include "beamsw/ucb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace beamsw {

double bandit_reward(double snr_db) { return std::clamp(snr_db, 0.0, 60.0) / 60.0; }

UcbBandits::UcbBandits(std::size_t n_users, std::size_t n_arms, double exploration, std::size_t window)
    : n_users_(n_users),
      n_arms_(n_arms),
      exploration_(exploration),
      window_(window),
      counts_(n_users * n_arms, 0),
      means_(n_users * n_arms, 0.0),
      totals_(n_users, 0),
      history_(window > 0 ? n_users : 0) {
  if (n_users == 0 || n_arms == 0) throw std::invalid_argument("UcbBandits: need at least one user and arm");
  if (!(exploration >= 0.0)) throw std::invalid_argument("UcbBandits: exploration must be >= 0");
}

std::size_t UcbBandits::slot(std::size_t user, std::size_t arm) const {
  if (user >= n_users_ || arm >= n_arms_) throw std::out_of_range("UcbBandits: user or arm out of range");
  return user * n_arms_ + arm;
}

double UcbBandits::index(std::size_t user, std::size_t arm) const {
  const std::size_t n = counts_[slot(user, arm)];
  if (n == 0) return std::numeric_limits<double>::infinity();
  const double t = static_cast<double>(totals_[user]);
  return means_[slot(user, arm)] + exploration_ * std::sqrt(std::log(t) / static_cast<double>(n));
}

std::size_t UcbBandits::select(std::size_t user) const {
  for (std::size_t arm = 0; arm < n_arms_; ++arm) {
    if (counts_[slot(user, arm)] == 0) return arm;
  }
  std::size_t best = 0;
  double best_index = -std::numeric_limits<double>::infinity();
  for (std::size_t arm = 0; arm < n_arms_; ++arm) {
    const double value = index(user, arm);
    if (value > best_index) {
      best_index = value;
      best = arm;
    }
  }
  return best;
}

void UcbBandits::update(std::size_t user, std::size_t arm, double reward) {
  const std::size_t s = slot(user, arm);
  ++counts_[s];
  ++totals_[user];
  means_[s] += (reward - means_[s]) / static_cast<double>(counts_[s]);

  if (window_ == 0) return;
  auto& hist = history_[user];
  hist.emplace_back(arm, reward);
  if (hist.size() > window_) {
    const auto [old_arm, old_reward] = hist.front();
    hist.pop_front();
    const std::size_t o = slot(user, old_arm);
    const std::size_t n = counts_[o];
    means_[o] = n > 1 ? (means_[o] * static_cast<double>(n) - old_reward) / static_cast<double>(n - 1) : 0.0;
    --counts_[o];
    --totals_[user];
  }
}

}  // namespace beamsw
