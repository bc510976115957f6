#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "heatsup/rng.hpp"

using namespace heatsup;

// Known-answer vectors of the Random123 reference implementation.
TEST(Philox, KnownAnswerZero) {
  const auto r = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(r[0], 0x6627e8d5u);
  EXPECT_EQ(r[1], 0xe169c58du);
  EXPECT_EQ(r[2], 0xbc57ac4cu);
  EXPECT_EQ(r[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
  const auto r = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(r[0], 0x408f276du);
  EXPECT_EQ(r[1], 0x41c83b0eu);
  EXPECT_EQ(r[2], 0xa20bc7c6u);
  EXPECT_EQ(r[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
  const auto r = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(r[0], 0xd16cfe09u);
  EXPECT_EQ(r[1], 0x94fdccebu);
  EXPECT_EQ(r[2], 0x5001e420u);
  EXPECT_EQ(r[3], 0x24126ea1u);
}

TEST(NormalStream, AddressableInAnyOrder) {
  const NormalStream s(7, 3, StreamTag::SpectralModes);
  std::vector<double> block(10);
  s.fill(5, block.data(), block.size());
  for (std::size_t i = 0; i < block.size(); ++i) EXPECT_EQ(block[i], s(5 + i));
  EXPECT_EQ(s(12), NormalStream(7, 3, StreamTag::SpectralModes)(12));
}

TEST(NormalStream, StreamsDiffer) {
  const NormalStream a(7, 3, StreamTag::SpectralModes), b(7, 4, StreamTag::SpectralModes),
      c(7, 3, StreamTag::FdNoise), d(8, 3, StreamTag::SpectralModes);
  EXPECT_NE(a(0), b(0));
  EXPECT_NE(a(0), c(0));
  EXPECT_NE(a(0), d(0));
}

TEST(NormalStream, MomentsOfStandardNormal) {
  const NormalStream s(1, 0, StreamTag::Initial);
  const int n = 200000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = s(i);
    m1 += z;
    m2 += z * z;
    m3 += z * z * z;
    m4 += z * z * z * z;
  }
  m1 /= n, m2 /= n, m3 /= n, m4 /= n;
  EXPECT_NEAR(m1, 0.0, 5.0 / std::sqrt(n));
  EXPECT_NEAR(m2, 1.0, 5.0 * std::sqrt(2.0 / n));
  EXPECT_NEAR(m3, 0.0, 5.0 * std::sqrt(15.0 / n));
  EXPECT_NEAR(m4, 3.0, 5.0 * std::sqrt(96.0 / n));
}

TEST(NormalStream, UniformInOpenUnitInterval) {
  const NormalStream s(2, 0, StreamTag::Bootstrap);
  double mean = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform(i);
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    mean += u;
  }
  EXPECT_NEAR(mean / n, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
}
