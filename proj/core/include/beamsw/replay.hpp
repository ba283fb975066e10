#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "beamsw/env.hpp"
#include "beamsw/rng.hpp"

namespace beamsw {

struct Transition {
  Observation state;
  std::size_t action = 0;
  double reward = 0.0;
  Observation next_state;
  std::size_t user_id = 0;
};

/// Binary sum tree over a power-of-two number of leaves. Internal nodes are
/// always recomputed from their children, so no floating drift accumulates.
class SumTree {
 public:
  explicit SumTree(std::size_t capacity);

  std::size_t capacity() const { return capacity_; }
  void set(std::size_t leaf, double value);
  double get(std::size_t leaf) const { return nodes_[leaves_ + leaf]; }
  double total() const { return nodes_[1]; }
  /// Leaf whose cumulative interval contains `prefix` in [0, total()).
  std::size_t find(double prefix) const;

  /// Heap-ordered node array: root at 1, leaves at [leaf_offset(), 2 * leaf_offset()).
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t leaf_offset() const { return leaves_; }

 private:
  std::size_t capacity_;
  std::size_t leaves_;
  std::vector<double> nodes_;
};

struct PriorityBufferConfig {
  std::size_t capacity = 100000;
  double alpha = 0.6;
  double priority_epsilon = 0.01;
};

/// Proportional prioritized replay. Raw priorities are |td| + epsilon; the
/// tree stores priority^alpha so sampling probability is p^a / sum p^a.
class PriorityBuffer {
 public:
  explicit PriorityBuffer(PriorityBufferConfig config);

  struct Sample {
    std::vector<Transition> transitions;
    std::vector<std::size_t> indices;
    std::vector<double> is_weights;
  };

  /// Inserts at the running max priority (1.0 when nothing has been seen),
  /// evicting the oldest entry at capacity.
  void push(const Transition& t);

  /// Stratified draw of `batch` entries; IS weights (N P(i))^-beta divided by
  /// the batch maximum.
  Sample sample(std::size_t batch, double beta, Rng& rng) const;

  void update_priorities(std::span<const std::size_t> indices, std::span<const double> td_errors);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return config_.capacity; }
  std::size_t evictions() const { return evictions_; }
  double max_priority() const { return max_priority_; }
  double priority(std::size_t index) const { return priorities_.at(index); }
  const SumTree& tree() const { return tree_; }
  const PriorityBufferConfig& config() const { return config_; }
  const Transition& at(std::size_t index) const { return storage_.at(index); }

 private:
  void set_priority(std::size_t index, double priority);

  PriorityBufferConfig config_;
  SumTree tree_;
  std::vector<Transition> storage_;
  std::vector<double> priorities_;
  std::size_t next_ = 0;
  std::size_t size_ = 0;
  std::size_t evictions_ = 0;
  double max_priority_ = 1.0;
};

}  // namespace beamsw
