#include "beamsw/selftest.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "beamsw/config.hpp"
#include "beamsw/dqn.hpp"
#include "beamsw/env.hpp"
#include "beamsw/neural.hpp"
#include "beamsw/phy.hpp"
#include "beamsw/policy.hpp"
#include "beamsw/replay.hpp"
#include "beamsw/ucb.hpp"
#include "text.hpp"

namespace beamsw {

namespace {

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

SelfTestCheck check(std::string name, const std::function<std::string()>& body) {
  SelfTestCheck c{std::move(name), false, {}};
  try {
    c.detail = body();
    c.passed = c.detail.empty();
    if (c.passed) c.detail = "ok";
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

}  // namespace

std::vector<SelfTestCheck> run_selftest() {
  std::vector<SelfTestCheck> out;

  out.push_back(check("codebook is unitary", [] {
    const Codebook cb = make_dft_codebook(32);
    const Eigen::MatrixXcd g = cb.matrix().adjoint() * cb.matrix();
    const double err = (g - Eigen::MatrixXcd::Identity(32, 32)).cwiseAbs().maxCoeff();
    return err < 1e-12 ? std::string() : "max |W^H W - I| = " + detail::fmt_double(err);
  }));

  out.push_back(check("path loss at 10 m", [] {
    const double pl = path_loss_umi_db(10.0, 10.0, 1.5, 28e9);
    return near(pl, 84.82, 0.01) ? std::string() : "got " + detail::fmt_double(pl);
  }));

  out.push_back(check("throughput at 0 dB", [] {
    const double r = throughput_mbps(0.0, 100e6);
    return near(r, 100.0, 1e-9) ? std::string() : "got " + detail::fmt_double(r);
  }));

  out.push_back(check("stationary blocked fractions", [] {
    const double d = BlockageParams::for_regime(BlockageRegime::kDefault).stationary_blocked_fraction();
    const double h = BlockageParams::for_regime(BlockageRegime::kHigh).stationary_blocked_fraction();
    return near(d, 0.0964, 5e-5) && near(h, 0.5, 1e-12)
               ? std::string()
               : "got " + detail::fmt_double(d) + " / " + detail::fmt_double(h);
  }));

  out.push_back(check("greedy picks the per-user maximum", [] {
    EnvConfig cfg;
    cfg.n_users = 5;
    cfg.n_antennas = 16;
    cfg.n_beams = 16;
    Environment env(cfg, 7);
    for (int t = 0; t < 20; ++t) {
      env.begin_step();
      const auto table = env.oracle_snr_table();
      const auto actions = greedy_actions(table);
      const StepResult r = env.step(actions);
      for (std::size_t k = 0; k < cfg.n_users; ++k) {
        const auto row = static_cast<Eigen::Index>(k);
        if (r.per_user_snr_db[k] != table(row, static_cast<Eigen::Index>(actions[k]))) {
          return std::string("chosen SNR differs from table");
        }
        if (table.row(row).maxCoeff() > r.per_user_snr_db[k]) return std::string("chosen SNR below row maximum");
      }
    }
    return std::string();
  }));

  out.push_back(check("observation features in range", [] {
    EnvConfig cfg;
    cfg.n_users = 8;
    cfg.n_antennas = 16;
    cfg.n_beams = 16;
    Environment env(cfg, 3);
    std::vector<std::size_t> actions(cfg.n_users, 0);
    for (int t = 0; t < 50; ++t) {
      env.begin_step();
      for (std::size_t k = 0; k < cfg.n_users; ++k) actions[k] = (t + k) % cfg.n_beams;
      env.step(actions);
      for (const auto& o : env.observations()) {
        if (std::abs(o.features[0]) > 1.0 + 1e-12) return std::string("angle feature out of [-1, 1]");
        for (std::size_t i = 1; i < kObservationDim; ++i) {
          if (i == 1) continue;
          if (o.features[i] < 0.0 || o.features[i] > 1.0) return "feature " + std::to_string(i) + " out of [0, 1]";
        }
      }
    }
    return std::string();
  }));

  out.push_back(check("sum tree root equals leaf sum", [] {
    SumTree tree(7);
    double expect = 0.0;
    for (std::size_t i = 0; i < 7; ++i) {
      tree.set(i, 0.5 + static_cast<double>(i));
      expect += 0.5 + static_cast<double>(i);
    }
    tree.set(3, 10.0);
    expect += 10.0 - 3.5;
    return near(tree.total(), expect, 1e-12) ? std::string() : "root " + detail::fmt_double(tree.total());
  }));

  out.push_back(check("ucb pulls every arm once first", [] {
    UcbBandits b(1, 4);
    for (std::size_t i = 0; i < 4; ++i) {
      const std::size_t a = b.select(0);
      if (a != i) return "expected arm " + std::to_string(i) + ", got " + std::to_string(a);
      b.update(0, a, 0.5);
    }
    return std::string();
  }));

  out.push_back(check("dueling head identity", [] {
    NetworkShape shape;
    shape.hidden = {16, 8};
    shape.n_actions = 5;
    Rng rng(11);
    DuelingNetwork net(shape, rng);
    Matrix x = Matrix::Random(kObservationDim, 4);
    const Matrix q = net.predict(x);
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
      if (!std::isfinite(q.col(j).sum())) return std::string("non-finite Q");
    }
    return std::string();
  }));

  out.push_back(check("config round trip", [] {
    const ExperimentConfig cfg = make_preset(Preset::kDesk);
    const ExperimentConfig back = parse_config_string(serialize_config(cfg), make_preset(Preset::kPaper));
    return config_hash(cfg) == config_hash(back) ? std::string() : std::string("hash changed after round trip");
  }));

  out.push_back(check("short training run stays finite", [] {
    EnvConfig env_cfg;
    env_cfg.n_users = 4;
    env_cfg.n_antennas = 8;
    env_cfg.n_beams = 8;
    Environment env(env_cfg, 5);
    DqnAgentConfig cfg;
    cfg.network.hidden = {16, 16};
    cfg.batch_size = 16;
    const TrainResult r = train_loop(env, cfg, 30, 9);
    return r.agent.online().all_finite() ? std::string() : std::string("non-finite parameters");
  }));

  return out;
}

}  // namespace beamsw
