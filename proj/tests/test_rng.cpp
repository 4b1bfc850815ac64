#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "ergodic/rng.hpp"

using ergodic::Philox4x32;

TEST(Philox, KnownAnswerVectors) {
  using B = Philox4x32::Block;
  EXPECT_EQ(Philox4x32::bijection(B{0, 0, 0, 0}, {0, 0}),
            (B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
  const std::uint32_t ff = 0xffffffffu;
  EXPECT_EQ(Philox4x32::bijection(B{ff, ff, ff, ff}, {ff, ff}),
            (B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
  EXPECT_EQ(Philox4x32::bijection(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                  {0xa4093822u, 0x299f31d0u}),
            (B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, SameSeedAndStreamRepeat) {
  Philox4x32 a(42, 3), b(42, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Philox, StreamsAndSeedsDiffer) {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 8; ++s) {
    for (std::uint64_t st = 0; st < 8; ++st) firsts.insert(Philox4x32(s, st)());
  }
  EXPECT_EQ(firsts.size(), 64u);
}

TEST(Philox, UniformBitsLookUniform) {
  Philox4x32 g(7, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = static_cast<double>(g() >> 11) * 0x1.0p-53;
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - mean * mean, 1.0 / 12.0, 2e-3);
}
