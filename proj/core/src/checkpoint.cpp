#include <array>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "beamsw/neural.hpp"

namespace beamsw {

namespace {

constexpr std::array<char, 8> kMagic = {'B', 'E', 'A', 'M', 'S', 'W', 'C', 'K'};

enum class TensorKind : std::uint32_t { kParameter = 0, kBuffer = 1, kFirstMoment = 2, kSecondMoment = 3 };

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
  }
  template <typename T>
  void put(const T& value) {
    out_.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
  void tensor(TensorKind kind, const Matrix& m) {
    put(static_cast<std::uint32_t>(kind));
    put(static_cast<std::uint64_t>(m.rows()));
    put(static_cast<std::uint64_t>(m.cols()));
    out_.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
  }
  void finish() {
    out_.flush();
    if (!out_) throw std::runtime_error("checkpoint write failed");
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary) {
    if (!in_) throw std::runtime_error("cannot open checkpoint: " + path.string());
  }
  template <typename T>
  T get() {
    T value{};
    in_.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in_) throw std::runtime_error("checkpoint truncated");
    return value;
  }
  void tensor_into(TensorKind expected, Matrix& m) {
    const auto kind = get<std::uint32_t>();
    const auto rows = get<std::uint64_t>();
    const auto cols = get<std::uint64_t>();
    if (kind != static_cast<std::uint32_t>(expected) || rows != static_cast<std::uint64_t>(m.rows()) ||
        cols != static_cast<std::uint64_t>(m.cols())) {
      throw std::runtime_error("checkpoint tensor does not match the declared architecture");
    }
    in_.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
    if (!in_) throw std::runtime_error("checkpoint truncated");
  }

 private:
  std::ifstream in_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const DuelingNetwork& network,
                     const AdamState* optimizer) {
  Writer w(path);
  for (char c : kMagic) w.put(c);
  w.put(kCheckpointVersion);

  const NetworkShape& s = network.shape();
  w.put(static_cast<std::uint64_t>(s.input_dim));
  w.put(static_cast<std::uint64_t>(s.hidden.size()));
  for (std::size_t width : s.hidden) w.put(static_cast<std::uint64_t>(width));
  w.put(static_cast<std::uint64_t>(s.n_actions));
  w.put(s.dropout);
  w.put(s.bn_momentum);
  w.put(s.bn_epsilon);

  w.put(static_cast<std::uint64_t>(network.parameters().size()));
  for (const auto& p : network.parameters()) w.tensor(TensorKind::kParameter, p);
  w.put(static_cast<std::uint64_t>(network.buffers().size()));
  for (const auto& b : network.buffers()) w.tensor(TensorKind::kBuffer, b);

  w.put(static_cast<std::uint8_t>(optimizer != nullptr ? 1 : 0));
  if (optimizer != nullptr) {
    w.put(optimizer->step);
    w.put(optimizer->config.learning_rate);
    w.put(optimizer->config.beta1);
    w.put(optimizer->config.beta2);
    w.put(optimizer->config.epsilon);
    for (const auto& m : optimizer->first_moment) w.tensor(TensorKind::kFirstMoment, m);
    for (const auto& v : optimizer->second_moment) w.tensor(TensorKind::kSecondMoment, v);
  }
  w.finish();
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  for (char c : kMagic) {
    if (r.get<char>() != c) throw std::runtime_error("not a beamsw checkpoint: " + path.string());
  }
  const auto version = r.get<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }

  NetworkShape shape;
  shape.input_dim = r.get<std::uint64_t>();
  const auto n_hidden = r.get<std::uint64_t>();
  if (n_hidden == 0 || n_hidden > 64) throw std::runtime_error("checkpoint has an invalid layer count");
  shape.hidden.resize(n_hidden);
  for (auto& width : shape.hidden) width = r.get<std::uint64_t>();
  shape.n_actions = r.get<std::uint64_t>();
  shape.dropout = r.get<double>();
  shape.bn_momentum = r.get<double>();
  shape.bn_epsilon = r.get<double>();

  Checkpoint ckpt{DuelingNetwork(shape), std::nullopt};
  if (r.get<std::uint64_t>() != ckpt.network.parameters().size()) {
    throw std::runtime_error("checkpoint parameter count mismatch");
  }
  for (auto& p : ckpt.network.parameters()) r.tensor_into(TensorKind::kParameter, p);
  if (r.get<std::uint64_t>() != ckpt.network.buffers().size()) {
    throw std::runtime_error("checkpoint buffer count mismatch");
  }
  for (auto& b : ckpt.network.buffers()) r.tensor_into(TensorKind::kBuffer, b);

  if (r.get<std::uint8_t>() != 0) {
    AdamConfig cfg;
    const auto step = r.get<std::int64_t>();
    cfg.learning_rate = r.get<double>();
    cfg.beta1 = r.get<double>();
    cfg.beta2 = r.get<double>();
    cfg.epsilon = r.get<double>();
    AdamState state(ckpt.network.parameters(), cfg);
    state.step = step;
    for (auto& m : state.first_moment) r.tensor_into(TensorKind::kFirstMoment, m);
    for (auto& v : state.second_moment) r.tensor_into(TensorKind::kSecondMoment, v);
    ckpt.optimizer = std::move(state);
  }
  return ckpt;
}

}  // namespace beamsw
