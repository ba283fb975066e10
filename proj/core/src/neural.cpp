#include "beamsw/neural.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace beamsw {

void NetworkShape::validate() const {
  if (input_dim == 0) throw std::invalid_argument("network input_dim must be >= 1");
  if (hidden.empty()) throw std::invalid_argument("network needs at least one hidden layer");
  for (std::size_t w : hidden) {
    if (w == 0) throw std::invalid_argument("hidden widths must be >= 1");
  }
  if (n_actions == 0) throw std::invalid_argument("n_actions must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("dropout must be in [0,1)");
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0)) {
    throw std::invalid_argument("bn_momentum must be in (0,1]");
  }
  if (!(bn_epsilon > 0.0)) throw std::invalid_argument("bn_epsilon must be > 0");
}

namespace {

Eigen::Index idx(std::size_t n) { return static_cast<Eigen::Index>(n); }

void he_uniform(Matrix& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(w.cols()));
  std::uniform_real_distribution<double> u(-limit, limit);
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) w(i, j) = u(rng);
  }
}

}  // namespace

DuelingNetwork::DuelingNetwork(NetworkShape shape) : shape_(std::move(shape)) {
  shape_.validate();
  std::size_t fan_in = shape_.input_dim;
  for (std::size_t width : shape_.hidden) {
    params_.push_back(Matrix::Zero(idx(width), idx(fan_in)));
    params_.push_back(Matrix::Zero(idx(width), 1));
    params_.push_back(Matrix::Ones(idx(width), 1));
    params_.push_back(Matrix::Zero(idx(width), 1));
    buffers_.push_back(Matrix::Zero(idx(width), 1));
    buffers_.push_back(Matrix::Ones(idx(width), 1));
    fan_in = width;
  }
  params_.push_back(Matrix::Zero(1, idx(fan_in)));
  params_.push_back(Matrix::Zero(1, 1));
  params_.push_back(Matrix::Zero(idx(shape_.n_actions), idx(fan_in)));
  params_.push_back(Matrix::Zero(idx(shape_.n_actions), 1));
}

DuelingNetwork::DuelingNetwork(NetworkShape shape, Rng& init_rng) : DuelingNetwork(std::move(shape)) {
  for (std::size_t l = 0; l < n_layers(); ++l) he_uniform(params_[4 * l], init_rng);
  he_uniform(value_weight(), init_rng);
  he_uniform(advantage_weight(), init_rng);
}

Matrix DuelingNetwork::forward(const Matrix& states, Mode mode, Rng* rng) {
  return forward_impl(states, mode, rng, nullptr, mode == Mode::kTrain);
}

Matrix DuelingNetwork::predict(const Matrix& states) const {
  // Eval mode never touches caches or statistics.
  return const_cast<DuelingNetwork*>(this)->forward_impl(states, Mode::kEval, nullptr, nullptr, false);
}

Matrix DuelingNetwork::forward_impl(const Matrix& states, Mode mode, Rng* rng, Cache* cache,
                                    bool update_stats) {
  if (states.rows() != idx(shape_.input_dim)) {
    throw std::invalid_argument("forward: expected " + std::to_string(shape_.input_dim) +
                                " input rows, got " + std::to_string(states.rows()));
  }
  const Eigen::Index batch = states.cols();
  if (batch < 1) throw std::invalid_argument("forward: empty batch");
  const bool train = mode == Mode::kTrain;
  const bool batch_stats = train && !frozen_bn_;
  if (batch_stats && batch < 2) {
    throw std::invalid_argument("forward: train-mode batch norm needs a batch of at least 2");
  }
  const bool use_dropout = train && shape_.dropout > 0.0;
  if (use_dropout && rng == nullptr) throw std::invalid_argument("forward: dropout needs a random stream");
  const double keep = 1.0 - shape_.dropout;

  if (cache != nullptr) cache->layers.assign(n_layers(), {});

  Matrix x = states;
  for (std::size_t l = 0; l < n_layers(); ++l) {
    const Matrix& w = params_[4 * l];
    const Matrix& b = params_[4 * l + 1];
    const Matrix& gamma = params_[4 * l + 2];
    const Matrix& beta = params_[4 * l + 3];

    Matrix z = w * x;
    z.colwise() += b.col(0);

    Vector mean;
    Vector var;
    if (batch_stats) {
      mean = z.rowwise().mean();
      var = (z.colwise() - mean).array().square().rowwise().mean();
      if (update_stats) {
        const double m = shape_.bn_momentum;
        const double unbias = static_cast<double>(batch) / static_cast<double>(batch - 1);
        buffers_[2 * l] = (1.0 - m) * buffers_[2 * l] + m * mean;
        buffers_[2 * l + 1] = (1.0 - m) * buffers_[2 * l + 1] + (m * unbias) * var;
      }
    } else {
      mean = buffers_[2 * l].col(0);
      var = buffers_[2 * l + 1].col(0);
    }
    const Vector inv_std = (var.array() + shape_.bn_epsilon).rsqrt();
    Matrix xhat = (z.colwise() - mean).array().colwise() * inv_std.array();
    Matrix y = (xhat.array().colwise() * gamma.col(0).array()).matrix();
    y.colwise() += beta.col(0);

    Matrix a = y.cwiseMax(0.0);
    Matrix mask;
    if (use_dropout) {
      mask.resize(a.rows(), a.cols());
      const double scale = 1.0 / keep;
      for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        for (Eigen::Index i = 0; i < mask.rows(); ++i) mask(i, j) = uniform01(*rng) < keep ? scale : 0.0;
      }
      a.array() *= mask.array();
    }

    if (cache != nullptr) {
      LayerCache& lc = cache->layers[l];
      lc.input = std::move(x);
      lc.xhat = std::move(xhat);
      lc.inv_std = inv_std;
      lc.pre_activation = std::move(y);
      lc.dropout_mask = std::move(mask);
      lc.batch_stats = batch_stats;
    }
    x = std::move(a);
  }

  const std::size_t heads = 4 * n_layers();
  Matrix value = params_[heads] * x;
  value.array() += params_[heads + 1](0, 0);
  Matrix advantage = params_[heads + 2] * x;
  advantage.colwise() += params_[heads + 3].col(0);

  const Eigen::RowVectorXd centre = value.row(0) - advantage.colwise().mean();
  Matrix q = advantage;
  q.rowwise() += centre;

  if (cache != nullptr) {
    cache->features = std::move(x);
    cache->advantage = std::move(advantage);
  }
  return q;
}

DuelingNetwork::BackwardResult DuelingNetwork::backward(const Matrix& states,
                                                        std::span<const std::size_t> actions,
                                                        std::span<const double> targets,
                                                        std::span<const double> is_weights, Rng* rng) {
  const auto batch = static_cast<std::size_t>(states.cols());
  if (actions.size() != batch || targets.size() != batch || is_weights.size() != batch) {
    throw std::invalid_argument("backward: actions, targets and weights must match the batch size");
  }
  Cache cache;
  const Matrix q = forward_impl(states, Mode::kTrain, rng, &cache, true);

  BackwardResult out;
  out.td_errors.resize(idx(batch));
  Matrix dq = Matrix::Zero(q.rows(), q.cols());
  const double inv_b = 1.0 / static_cast<double>(batch);
  for (std::size_t j = 0; j < batch; ++j) {
    if (actions[j] >= shape_.n_actions) throw std::invalid_argument("backward: action out of range");
    const double td = targets[j] - q(idx(actions[j]), idx(j));
    out.td_errors(idx(j)) = td;
    out.loss += is_weights[j] * td * td * inv_b;
    dq(idx(actions[j]), idx(j)) = -2.0 * is_weights[j] * td * inv_b;
  }

  out.gradients.resize(params_.size());
  const std::size_t heads = 4 * n_layers();

  // Q = V + A - mean(A): dV sums dQ over actions, dA removes the per-sample mean.
  const Eigen::RowVectorXd d_value = dq.colwise().sum();
  Matrix d_adv = dq;
  d_adv.rowwise() -= dq.colwise().mean();

  const Matrix& h = cache.features;
  out.gradients[heads] = d_value * h.transpose();
  out.gradients[heads + 1] = Matrix::Constant(1, 1, d_value.sum());
  out.gradients[heads + 2] = d_adv * h.transpose();
  out.gradients[heads + 3] = d_adv.rowwise().sum();

  Matrix dx = params_[heads].transpose() * d_value + params_[heads + 2].transpose() * d_adv;

  for (std::size_t l = n_layers(); l-- > 0;) {
    const LayerCache& lc = cache.layers[l];
    if (lc.dropout_mask.size() > 0) dx.array() *= lc.dropout_mask.array();
    dx.array() *= (lc.pre_activation.array() > 0.0).cast<double>();

    const Matrix& gamma = params_[4 * l + 2];
    out.gradients[4 * l + 2] = (dx.array() * lc.xhat.array()).rowwise().sum().matrix();
    out.gradients[4 * l + 3] = dx.rowwise().sum();

    Matrix dxhat = dx.array().colwise() * gamma.col(0).array();
    Matrix dz;
    if (lc.batch_stats) {
      const double n = static_cast<double>(batch);
      const Vector sum_dxhat = dxhat.rowwise().sum();
      const Vector sum_dxhat_xhat = (dxhat.array() * lc.xhat.array()).rowwise().sum();
      Matrix t = n * dxhat;
      t.colwise() -= sum_dxhat;
      t.array() -= lc.xhat.array().colwise() * sum_dxhat_xhat.array();
      dz = (t.array().colwise() * (lc.inv_std.array() / n)).matrix();
    } else {
      dz = (dxhat.array().colwise() * lc.inv_std.array()).matrix();
    }

    out.gradients[4 * l] = dz * lc.input.transpose();
    out.gradients[4 * l + 1] = dz.rowwise().sum();
    if (l > 0) dx = params_[4 * l].transpose() * dz;
  }
  return out;
}

bool DuelingNetwork::all_finite() const {
  for (const auto& p : params_) {
    if (!p.allFinite()) return false;
  }
  for (const auto& b : buffers_) {
    if (!b.allFinite()) return false;
  }
  return true;
}

std::uint64_t DuelingNetwork::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](const Matrix& m) {
    h = fnv1a64(std::string_view(reinterpret_cast<const char*>(m.data()), sizeof(double) * m.size()), h);
  };
  for (const auto& p : params_) feed(p);
  for (const auto& b : buffers_) feed(b);
  return h;
}

void copy_parameters(const DuelingNetwork& src, DuelingNetwork& dst) {
  if (!(src.shape() == dst.shape())) throw std::invalid_argument("copy_parameters: architecture mismatch");
  dst.parameters() = src.parameters();
  dst.buffers() = src.buffers();
}

AdamState::AdamState(const std::vector<Matrix>& params, AdamConfig cfg) : config(cfg) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const auto& p : params) {
    first_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
    second_moment.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void adam_step(AdamState& state, std::vector<Matrix>& params, const std::vector<Matrix>& gradients) {
  if (params.size() != gradients.size() || params.size() != state.first_moment.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and moment counts differ");
  }
  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& m = state.first_moment[i];
    Matrix& v = state.second_moment[i];
    const Matrix& g = gradients[i];
    if (g.rows() != params[i].rows() || g.cols() != params[i].cols()) {
      throw std::invalid_argument("adam_step: gradient shape mismatch");
    }
    m = c.beta1 * m + (1.0 - c.beta1) * g;
    v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
    params[i].array() -= c.learning_rate * (m.array() / correction1) /
                         ((v.array() / correction2).sqrt() + c.epsilon);
  }
}

}  // namespace beamsw
