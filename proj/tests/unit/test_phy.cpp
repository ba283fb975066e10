#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "beamsw/phy.hpp"

using namespace beamsw;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Codebook, OnePointIsUnity) {
  const Codebook cb = make_dft_codebook(1);
  ASSERT_EQ(cb.n_beams(), 1u);
  EXPECT_NEAR(std::abs(cb.matrix()(0, 0) - Complex(1.0, 0.0)), 0.0, 1e-15);
}

TEST(Codebook, TwoPointBeams) {
  const Codebook cb = make_dft_codebook(2);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(cb.beam(0)(0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cb.beam(0)(1) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cb.beam(1)(0) - r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cb.beam(1)(1) + r), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cb.beam(0).dot(cb.beam(1))), 0.0, 1e-15);
}

TEST(Codebook, ElementFormula) {
  const std::size_t n = 16;
  const Codebook cb = make_dft_codebook(n);
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t e = 0; e < n; ++e) {
      const Complex expect = std::polar(1.0 / std::sqrt(double(n)), 2.0 * kPi * double(e * b) / double(n));
      ASSERT_NEAR(std::abs(cb.beam(b)(Eigen::Index(e)) - expect), 0.0, 1e-12);
    }
  }
}

TEST(Codebook, SubsetTakesEvenlySpacedColumns) {
  const Codebook full = make_dft_codebook(16);
  const Codebook sub = make_dft_codebook(16, 4);
  ASSERT_EQ(sub.n_beams(), 4u);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_NEAR((sub.beam(j) - full.beam(4 * j)).norm(), 0.0, 1e-15);
  }
  EXPECT_THROW(make_dft_codebook(4, 8), std::invalid_argument);
  EXPECT_THROW(make_dft_codebook(0), std::invalid_argument);
}

TEST(Steering, Examples) {
  const ChannelVector s0 = steering_vector(0.0, 4, 0.5);
  for (Eigen::Index n = 0; n < 4; ++n) EXPECT_NEAR(std::abs(s0(n) - Complex(0.5, 0.0)), 0.0, 1e-15);

  const ChannelVector s = steering_vector(kPi / 6.0, 2, 0.5);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(s(0) - Complex(r, 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s(1) - Complex(0.0, r)), 0.0, 1e-12);

  for (double a = -kPi / 2; a <= kPi / 2; a += 0.1) {
    EXPECT_NEAR(steering_vector(a, 64, 0.5).squaredNorm(), 1.0, 1e-12);
  }
}

TEST(PathLoss, Examples) {
  // Oracle: first-slope UMi LOS formula written out independently.
  auto pl1 = [](double d2, double hb, double hu, double f_ghz) {
    const double d3 = std::hypot(std::max(d2, 1.0), hb - hu);
    return 32.4 + 21.0 * std::log10(d3) + 20.0 * std::log10(f_ghz);
  };
  EXPECT_NEAR(path_loss_umi_db(10.0, 10.0, 1.5, 28e9), 84.82, 0.005);
  EXPECT_NEAR(path_loss_umi_db(10.0, 10.0, 1.5, 28e9), pl1(10.0, 10.0, 1.5, 28.0), 1e-12);
  EXPECT_NEAR(path_loss_umi_db(1.0, 10.0, 1.5, 28e9), 80.93, 0.01);
  EXPECT_NEAR(path_loss_umi_db(1.0, 10.0, 1.5, 28e9), pl1(1.0, 10.0, 1.5, 28.0), 1e-12);
  EXPECT_DOUBLE_EQ(path_loss_umi_db(0.2, 10.0, 1.5, 28e9), path_loss_umi_db(1.0, 10.0, 1.5, 28e9));
  EXPECT_NEAR(umi_breakpoint_m(10.0, 1.5, 28e9), 1680.0, 1e-9);
  EXPECT_THROW(path_loss_umi_db(10.0, 0.0, 1.5, 28e9), std::invalid_argument);
}

TEST(PathLoss, SecondSlopeBeyondBreakpointAndContinuity) {
  const double bp = umi_breakpoint_m(10.0, 1.5, 28e9);
  const double below = path_loss_umi_db(bp * (1.0 - 1e-9), 10.0, 1.5, 28e9);
  const double above = path_loss_umi_db(bp * (1.0 + 1e-9), 10.0, 1.5, 28e9);
  // The two 38.901 slopes meet at the breakpoint to within a fraction of a dB.
  EXPECT_NEAR(below, above, 0.5);
  const double d = 3000.0;
  const double d3 = std::hypot(d, 8.5);
  const double expect = 32.4 + 40.0 * std::log10(d3) + 20.0 * std::log10(28.0) - 9.5 * std::log10(bp * bp + 8.5 * 8.5);
  EXPECT_NEAR(path_loss_umi_db(d, 10.0, 1.5, 28e9), expect, 1e-12);
}

TEST(Fading, RayleighMomentsAndElementVariance) {
  ChannelModelConfig cfg;
  cfg.mode = ChannelMode::kPureRayleigh;
  Rng rng(1);
  const int draws = 100000;
  double norm_sum = 0.0;
  for (int i = 0; i < draws; ++i) norm_sum += sample_fading(rng, cfg, 0.0, 64).squaredNorm();
  const double mean = norm_sum / draws;
  EXPECT_GE(mean, 63.4);
  EXPECT_LE(mean, 64.6);

  // Per-element real/imag variance 0.5 within 2% over 1e6 scalar draws.
  Rng rng2(2);
  double re2 = 0.0, im2 = 0.0;
  const int n = 1000000 / 64;
  for (int i = 0; i < n; ++i) {
    const ChannelVector h = sample_fading(rng2, cfg, 0.0, 64);
    re2 += h.real().squaredNorm();
    im2 += h.imag().squaredNorm();
  }
  EXPECT_NEAR(re2 / (n * 64.0), 0.5, 0.01);
  EXPECT_NEAR(im2 / (n * 64.0), 0.5, 0.01);
}

TEST(Fading, RicianLimitsAndEnergy) {
  ChannelModelConfig los;
  los.rician_k_db = std::numeric_limits<double>::infinity();
  Rng rng(3);
  const Rng before = rng;
  const ChannelVector h = sample_fading(rng, los, 0.3, 16);
  EXPECT_NEAR((h - std::sqrt(16.0) * steering_vector(0.3, 16, 0.5)).norm(), 0.0, 1e-12);
  EXPECT_TRUE(rng == before);

  ChannelModelConfig k1;
  k1.rician_k_db = 0.0;
  Rng rng2(4);
  double sum = 0.0;
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) sum += sample_fading(rng2, k1, -0.7, 16).squaredNorm();
  EXPECT_NEAR(sum / draws / 16.0, 1.0, 0.01);
}

TEST(EffectiveChannel, Scaling) {
  ChannelVector h = ChannelVector::Constant(64, Complex(1.0, 0.0));
  EXPECT_NEAR((effective_channel(h, 0.0) - h).norm(), 0.0, 1e-15);
  EXPECT_NEAR((effective_channel(h, 20.0) - 0.1 * h).norm(), 0.0, 1e-15);
  EXPECT_NEAR(effective_channel(h, 84.82).squaredNorm() / 2.108e-7, 1.0, 1e-3);
}

TEST(Snr, LinkBudgetExamples) {
  LinkBudget lb;
  EXPECT_NEAR(lb.noise_power_dbm(), -87.0, 1e-12);
  EXPECT_NEAR(snr_db_from_gain(1.0, lb, false, false), 125.0, 1e-12);
  EXPECT_NEAR(snr_db_from_gain(1.0, lb, true, true), 113.0, 1e-12);
  EXPECT_NEAR(snr_db_from_gain(1.0, lb, true, false), 125.0, 1e-12);
  EXPECT_NEAR(snr_db_from_gain(1.0, lb, false, true), 125.0, 1e-12);
  EXPECT_EQ(snr_db_from_gain(0.0, lb, false, false), kSnrFloorDb);

  ChannelVector h(2);
  h << Complex(1.0, 0.0), Complex(0.0, 0.0);
  ChannelVector w(2);
  w << Complex(1.0, 0.0), Complex(0.0, 0.0);
  EXPECT_NEAR(snr_db(h, w, lb, false, false), 125.0, 1e-12);
}

TEST(Snr, MonotoneInPathLoss) {
  Rng rng(5);
  ChannelModelConfig cfg;
  const ChannelVector h = sample_fading(rng, cfg, 0.2, 16);
  const Codebook cb = make_dft_codebook(16);
  LinkBudget lb;
  double prev = std::numeric_limits<double>::infinity();
  for (double pl = 60.0; pl <= 140.0; pl += 1.0) {
    const double s = snr_db(effective_channel(h, pl), cb.beam(3), lb, false, false);
    EXPECT_LE(s, prev);
    prev = s;
  }
}

TEST(Throughput, Examples) {
  EXPECT_DOUBLE_EQ(throughput_mbps(0.0, 100e6), 100.0);
  EXPECT_NEAR(throughput_mbps(-60.0, 100e6), 1.4427e-4, 1e-8);
  // 100 log2(1 + 10^1.53)
  EXPECT_NEAR(throughput_mbps(15.3, 100e6), 512.451, 0.001);
  double prev = -1.0;
  for (double s = -80.0; s <= 80.0; s += 0.25) {
    const double r = throughput_mbps(s, 100e6);
    EXPECT_GT(r, prev);
    prev = r;
  }
  EXPECT_LT(throughput_mbps(-300.0, 100e6), 1e-20);
}

TEST(HeuristicBeam, Examples) {
  const Codebook cb = make_dft_codebook(64);
  EXPECT_EQ(heuristic_beam_index(0.0, cb, 0.5), 0u);
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    const double a = (uniform01(rng) - 0.5) * kPi;
    const std::size_t b = heuristic_beam_index(a, cb, 0.5);
    ASSERT_LT(b, 64u);
    // Oracle: brute-force argmax of |w^H a|.
    const ChannelVector s = steering_vector(a, 64, 0.5);
    std::size_t best = 0;
    double best_gain = -1.0;
    for (std::size_t j = 0; j < 64; ++j) {
      const double g = std::norm(cb.beam(j).dot(s));
      if (g > best_gain + 1e-12) {
        best_gain = g;
        best = j;
      }
    }
    ASSERT_EQ(b, best);
  }
}
