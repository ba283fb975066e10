#include "beamsw/replay.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace beamsw {

SumTree::SumTree(std::size_t capacity)
    : capacity_(capacity), leaves_(std::bit_ceil(std::max<std::size_t>(capacity, 1))),
      nodes_(2 * leaves_, 0.0) {
  if (capacity == 0) throw std::invalid_argument("SumTree: capacity must be >= 1");
}

void SumTree::set(std::size_t leaf, double value) {
  if (leaf >= capacity_) throw std::out_of_range("SumTree::set: leaf out of range");
  std::size_t node = leaves_ + leaf;
  nodes_[node] = value;
  for (node /= 2; node >= 1; node /= 2) nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
}

std::size_t SumTree::find(double prefix) const {
  std::size_t node = 1;
  while (node < leaves_) {
    const std::size_t left = 2 * node;
    if (prefix < nodes_[left] || nodes_[left + 1] <= 0.0) {
      node = left;
    } else {
      prefix -= nodes_[left];
      node = left + 1;
    }
  }
  return std::min(node - leaves_, capacity_ - 1);
}

PriorityBuffer::PriorityBuffer(PriorityBufferConfig config)
    : config_(config), tree_(config.capacity) {
  if (!(config_.alpha >= 0.0)) throw std::invalid_argument("PER alpha must be >= 0");
  if (!(config_.priority_epsilon > 0.0)) throw std::invalid_argument("PER priority epsilon must be > 0");
  storage_.resize(config_.capacity);
  priorities_.assign(config_.capacity, 0.0);
}

void PriorityBuffer::set_priority(std::size_t index, double priority) {
  priorities_[index] = priority;
  tree_.set(index, std::pow(priority, config_.alpha));
}

void PriorityBuffer::push(const Transition& t) {
  if (size_ == config_.capacity) ++evictions_;
  storage_[next_] = t;
  set_priority(next_, max_priority_);
  next_ = (next_ + 1) % config_.capacity;
  size_ = std::min(size_ + 1, config_.capacity);
}

PriorityBuffer::Sample PriorityBuffer::sample(std::size_t batch, double beta, Rng& rng) const {
  if (batch == 0) throw std::invalid_argument("PER sample: batch must be >= 1");
  if (batch > size_) {
    throw std::invalid_argument("PER sample: batch " + std::to_string(batch) + " exceeds buffer size " +
                                std::to_string(size_));
  }
  Sample out;
  out.transitions.reserve(batch);
  out.indices.reserve(batch);
  out.is_weights.reserve(batch);

  const double total = tree_.total();
  const double segment = total / static_cast<double>(batch);
  const double n = static_cast<double>(size_);
  double max_weight = 0.0;
  for (std::size_t i = 0; i < batch; ++i) {
    double u = (static_cast<double>(i) + uniform01(rng)) * segment;
    u = std::min(u, std::nextafter(total, 0.0));
    std::size_t leaf = tree_.find(u);
    if (leaf >= size_) leaf = size_ - 1;
    const double prob = tree_.get(leaf) / total;
    const double w = std::pow(n * prob, -beta);
    max_weight = std::max(max_weight, w);
    out.indices.push_back(leaf);
    out.is_weights.push_back(w);
    out.transitions.push_back(storage_[leaf]);
  }
  for (double& w : out.is_weights) w /= max_weight;
  return out;
}

void PriorityBuffer::update_priorities(std::span<const std::size_t> indices,
                                       std::span<const double> td_errors) {
  if (indices.size() != td_errors.size()) {
    throw std::invalid_argument("PER update: indices and td errors differ in length");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size_) throw std::out_of_range("PER update: index out of range");
    const double p = std::abs(td_errors[i]) + config_.priority_epsilon;
    set_priority(indices[i], p);
    max_priority_ = std::max(max_priority_, p);
  }
}

}  // namespace beamsw
