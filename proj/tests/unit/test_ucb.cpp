#include <gtest/gtest.h>

#include <cmath>

#include "beamsw/rng.hpp"
#include "beamsw/ucb.hpp"

using namespace beamsw;

TEST(Ucb, SweepsUnpulledArmsInOrder) {
  UcbBandits b(2, 64);
  for (std::size_t i = 0; i < 64; ++i) {
    ASSERT_EQ(b.select(0), i);
    b.update(0, i, 0.1);
  }
  EXPECT_EQ(b.select(1), 0u);  // users are independent
  for (std::size_t a = 0; a < 64; ++a) EXPECT_EQ(b.count(0, a), 1u);
}

TEST(Ucb, IndexExample) {
  UcbBandits b(1, 2, 2.0);
  b.update(0, 0, 0.5);
  b.update(0, 0, 0.5);
  b.update(0, 1, 0.4);
  EXPECT_NEAR(b.index(0, 0), 1.982, 5e-4);
  EXPECT_NEAR(b.index(0, 1), 2.496, 5e-4);
  EXPECT_NEAR(b.index(0, 0), 0.5 + 2.0 * std::sqrt(std::log(3.0) / 2.0), 1e-15);
  EXPECT_EQ(b.select(0), 1u);
}

TEST(Ucb, IncrementalMean) {
  UcbBandits b(1, 3);
  b.update(0, 2, 0.2);
  EXPECT_DOUBLE_EQ(b.mean(0, 2), 0.2);
  EXPECT_EQ(b.count(0, 2), 1u);
  b.update(0, 2, 0.4);
  EXPECT_NEAR(b.mean(0, 2), 0.3, 1e-15);
  EXPECT_EQ(b.count(0, 2), 2u);
  for (int i = 0; i < 10000; ++i) b.update(0, 1, 0.37);
  EXPECT_EQ(b.mean(0, 1), 0.37);
  EXPECT_EQ(b.total_pulls(0), 10002u);
}

TEST(Ucb, BanditReward) {
  EXPECT_DOUBLE_EQ(bandit_reward(-10.0), 0.0);
  EXPECT_DOUBLE_EQ(bandit_reward(30.0), 0.5);
  EXPECT_DOUBLE_EQ(bandit_reward(90.0), 1.0);
}

TEST(Ucb, SlidingWindowForgets) {
  UcbBandits b(1, 2, 2.0, 4);
  b.update(0, 0, 1.0);
  b.update(0, 1, 0.0);
  b.update(0, 0, 1.0);
  b.update(0, 0, 1.0);
  b.update(0, 0, 0.0);  // evicts the first pull of arm 0
  EXPECT_EQ(b.count(0, 0), 3u);
  EXPECT_NEAR(b.mean(0, 0), 2.0 / 3.0, 1e-12);
  EXPECT_EQ(b.total_pulls(0), 4u);
}

TEST(Ucb, StationaryBernoulliFindsBestArm) {
  const double p[4] = {0.2, 0.4, 0.6, 0.8};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    UcbBandits b(1, 4, 2.0);
    Rng rng(seed);
    int best = 0;
    for (int t = 0; t < 10000; ++t) {
      const std::size_t arm = b.select(0);
      ASSERT_LT(arm, 4u);
      b.update(0, arm, uniform01(rng) < p[arm] ? 1.0 : 0.0);
      if (t >= 9000 && arm == 3) ++best;
    }
    EXPECT_GE(best, 800) << "seed " << seed;
  }
}
