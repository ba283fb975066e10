#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "beamsw/rng.hpp"

namespace beamsw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

enum class Mode { kTrain, kEval };

struct NetworkShape {
  std::size_t input_dim = 8;
  std::vector<std::size_t> hidden = {512, 512, 256};
  std::size_t n_actions = 64;
  double dropout = 0.15;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;

  bool operator==(const NetworkShape&) const = default;
  void validate() const;
};

/// Dueling Q-network: a trunk of Dense -> BatchNorm -> ReLU -> Dropout
/// blocks feeding a scalar value head and an n_actions advantage head,
/// combined as Q = V + A - mean(A).
///
/// Batches are column-major: inputs are input_dim x batch and outputs are
/// n_actions x batch, one sample per column.
///
/// Parameter tensor layout, per trunk layer l: [W, b, gamma, beta], then the
/// heads [W_v, b_v, W_a, b_a]. Vectors are stored as n x 1 matrices. Buffers
/// hold [running_mean, running_var] per trunk layer.
class DuelingNetwork {
 public:
  /// All-zero parameters with unit running variance; used when loading.
  explicit DuelingNetwork(NetworkShape shape);
  /// He-uniform dense weights, zero biases, unit BN scale, zero BN shift.
  DuelingNetwork(NetworkShape shape, Rng& init_rng);

  const NetworkShape& shape() const { return shape_; }
  std::size_t n_layers() const { return shape_.hidden.size(); }

  /// Train mode uses batch statistics (unless batch norm is frozen), updates
  /// the running statistics and applies dropout drawn from `rng`. Eval mode
  /// is deterministic and consumes nothing.
  Matrix forward(const Matrix& states, Mode mode, Rng* rng = nullptr);
  /// Eval-mode forward without touching any state.
  Matrix predict(const Matrix& states) const;

  struct BackwardResult {
    std::vector<Matrix> gradients;
    /// Signed y_j - Q(s_j, a_j).
    Vector td_errors;
    double loss = 0.0;
  };

  /// Train-mode forward plus gradients of (1/B) sum_j w_j (y_j - Q(s_j, a_j))^2.
  BackwardResult backward(const Matrix& states, std::span<const std::size_t> actions,
                          std::span<const double> targets, std::span<const double> is_weights,
                          Rng* rng = nullptr);

  /// Train-mode forwards use the running statistics and leave them unchanged.
  void set_frozen_batch_norm(bool frozen) { frozen_bn_ = frozen; }
  bool frozen_batch_norm() const { return frozen_bn_; }

  std::vector<Matrix>& parameters() { return params_; }
  const std::vector<Matrix>& parameters() const { return params_; }
  std::vector<Matrix>& buffers() { return buffers_; }
  const std::vector<Matrix>& buffers() const { return buffers_; }

  Matrix& weight(std::size_t layer) { return params_[4 * layer]; }
  Matrix& running_mean(std::size_t layer) { return buffers_[2 * layer]; }
  Matrix& running_var(std::size_t layer) { return buffers_[2 * layer + 1]; }
  Matrix& value_weight() { return params_[4 * n_layers()]; }
  Matrix& value_bias() { return params_[4 * n_layers() + 1]; }
  Matrix& advantage_weight() { return params_[4 * n_layers() + 2]; }
  Matrix& advantage_bias() { return params_[4 * n_layers() + 3]; }

  bool all_finite() const;
  /// FNV-1a over the raw bytes of every parameter and buffer.
  std::uint64_t checksum() const;

 private:
  struct LayerCache {
    Matrix input;
    Matrix xhat;
    Vector inv_std;
    Matrix pre_activation;
    Matrix dropout_mask;
    bool batch_stats = false;
  };
  struct Cache {
    std::vector<LayerCache> layers;
    Matrix features;
    Matrix advantage;
  };

  Matrix forward_impl(const Matrix& states, Mode mode, Rng* rng, Cache* cache, bool update_stats);

  NetworkShape shape_;
  std::vector<Matrix> params_;
  std::vector<Matrix> buffers_;
  bool frozen_bn_ = false;
};

/// dst <- src for every parameter and buffer. Throws on shape mismatch.
void copy_parameters(const DuelingNetwork& src, DuelingNetwork& dst);

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(const std::vector<Matrix>& params, AdamConfig cfg);
};

/// Bias-corrected Adam update, in place.
void adam_step(AdamState& state, std::vector<Matrix>& params, const std::vector<Matrix>& gradients);

/// Packs a batch of fixed-width feature rows into an input_dim x batch matrix.
template <typename Range>
Matrix to_batch(const Range& rows, std::size_t dim) {
  Matrix out(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(std::size(rows)));
  Eigen::Index j = 0;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < dim; ++i) out(static_cast<Eigen::Index>(i), j) = row[i];
    ++j;
  }
  return out;
}

// Checkpoints ---------------------------------------------------------------

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  DuelingNetwork network;
  std::optional<AdamState> optimizer;
};

/// Binary dump: magic, format version, shape, then every tensor with its
/// explicit shape. Doubles are stored raw so load round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const DuelingNetwork& network,
                     const AdamState* optimizer = nullptr);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace beamsw
