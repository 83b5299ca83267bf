#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>

#include "occtime/mc_simulator.hpp"
#include "occtime/philox.hpp"

namespace rng = occtime::rng;

// Known-answer vectors published with the Random123 reference implementation.
TEST(Philox, KnownAnswerVectors) {
  EXPECT_EQ(rng::philox4x32_10({0, 0, 0, 0}, {0, 0}),
            (rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  EXPECT_EQ(rng::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                               {0xffffffffu, 0xffffffffu}),
            (rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(rng::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u}),
            (rng::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, UsableAtCompileTime) {
  constexpr rng::Counter c = rng::philox4x32_10({0, 0, 0, 0}, {0, 0});
  static_assert(c[0] == 0x6627e8d5u);
  SUCCEED();
}

TEST(Philox, KeyFromSeedSplitsWords) {
  const rng::Key k = rng::key_from_seed(0x0123456789abcdefull);
  EXPECT_EQ(k[0], 0x89abcdefu);
  EXPECT_EQ(k[1], 0x01234567u);
}

TEST(Philox, UniformStaysInOpenInterval) {
  EXPECT_GT(rng::to_unit_open(0, 0), 0.0);
  EXPECT_LT(rng::to_unit_open(0xffffffffu, 0xffffffffu), 1.0);
  EXPECT_NEAR(rng::to_unit_open(0x80000000u, 0), 0.5, 1e-15);
}

TEST(Philox, NormalPairIsAPureFunctionOfItsCounter) {
  const rng::Key key = rng::key_from_seed(42);
  const rng::NormalPair a = rng::normal_pair(key, 7, 3);
  const rng::NormalPair b = rng::normal_pair(key, 7, 3);
  EXPECT_EQ(a.first, b.first);
  EXPECT_EQ(a.second, b.second);
  const rng::NormalPair c = rng::normal_pair(key, 8, 3);
  EXPECT_NE(a.first, c.first);
  const rng::NormalPair d = rng::normal_pair(key, (std::uint64_t{1} << 32) + 7, 3);
  EXPECT_NE(a.first, d.first);
}

TEST(Philox, NormalMoments) {
  const rng::Key key = rng::key_from_seed(2024);
  occtime::mc::RunningStat s1, s2;
  double m3 = 0.0, m4 = 0.0, cross = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    const rng::NormalPair z = rng::normal_pair(key, static_cast<std::uint64_t>(i), 0u);
    s1.add(z.first);
    s2.add(z.second);
    m3 += z.first * z.first * z.first;
    m4 += z.first * z.first * z.first * z.first;
    cross += z.first * z.second;
  }
  // Tolerances are about five standard errors.
  EXPECT_NEAR(s1.mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s2.mean, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(s1.variance(), 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s2.variance(), 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m3 / n, 0.0, 5.0 * std::sqrt(15.0 / n));
  EXPECT_NEAR(m4 / n, 3.0, 5.0 * std::sqrt(96.0 / n));
  EXPECT_NEAR(cross / n, 0.0, 5.0 / std::sqrt(n));
}
