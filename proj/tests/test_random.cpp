#include <gtest/gtest.h>

#include <cmath>

#include "chaoslab/random.hpp"

using namespace chaoslab;

// Known-answer vectors of the Random123 distribution for Philox4x32-10.
TEST(Philox, KnownAnswerZero) {
  const Philox4x32 p(0);
  const auto r = p({0, 0, 0, 0});
  EXPECT_EQ(r[0], 0x6627e8d5u);
  EXPECT_EQ(r[1], 0xe169c58du);
  EXPECT_EQ(r[2], 0xbc57ac4cu);
  EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const Philox4x32 p(0xffffffffffffffffull);
  const auto r = p({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu});
  EXPECT_EQ(r[0], 0x408f276du);
  EXPECT_EQ(r[1], 0x41c83b0eu);
  EXPECT_EQ(r[2], 0xa20bc7c6u);
  EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const Philox4x32 p(0x299f31d0a4093822ull);
  const auto r = p({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u});
  EXPECT_EQ(r[0], 0xd16cfe09u);
  EXPECT_EQ(r[1], 0x94fdccebu);
  EXPECT_EQ(r[2], 0x5001e420u);
  EXPECT_EQ(r[3], 0x24126ea1u);
}

TEST(CounterRng, DrawsArePureFunctionsOfAddress) {
  const CounterRng a(7, 3), b(7, 3), c(7, 4);
  EXPECT_EQ(a.normal2(1, 2, StreamTag::kBrownian), b.normal2(1, 2, StreamTag::kBrownian));
  EXPECT_NE(a.normal2(1, 2, StreamTag::kBrownian), c.normal2(1, 2, StreamTag::kBrownian));
  EXPECT_NE(a.normal2(1, 2, StreamTag::kBrownian), a.normal2(1, 2, StreamTag::kInitial));
}

TEST(CounterRng, UniformsInHalfOpenUnitInterval) {
  const CounterRng rng(11, 0);
  for (std::uint32_t i = 0; i < 10000; ++i) {
    const auto u = rng.uniform2(0, i, StreamTag::kTrial);
    for (double v : u) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(CounterRng, NormalMoments) {
  const CounterRng rng(12345, 0);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    const auto z = rng.normal2(0, static_cast<std::uint32_t>(i), StreamTag::kMonteCarlo);
    s1 += z[0] + z[1];
    s2 += z[0] * z[0] + z[1] * z[1];
  }
  EXPECT_NEAR(s1 / n, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 5.0 * std::sqrt(2.0 / n));
}

TEST(BrownianDriver, IncrementScaleAndReplay) {
  const BrownianDriver w(5, 0, 0.01);
  std::vector<double> a(4), b(4);
  w.increment(2, 9, a);
  w.increment(2, 9, b);
  EXPECT_EQ(a, b);
  std::vector<double> z(4);
  CounterRng(5, 0).normals(2, 9, StreamTag::kBrownian, z);
  for (int k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(a[k], 0.1 * z[k]);
  EXPECT_THROW(BrownianDriver(5, 0, 0.0), std::exception);
}
