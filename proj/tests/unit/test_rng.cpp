#include <gtest/gtest.h>

#include <cmath>

#include "gsbound/rng.hpp"

using gsbound::Rng;

TEST(Rng, SameAddressSameStream) {
  Rng a(7, 3, 1), b(7, 3, 1);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(Rng, AddressesDiffer) {
  Rng a(7, 3, 1), b(7, 4, 1), c(7, 3, 2), d(8, 3, 1);
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_NE(x, c.next_u64());
  EXPECT_NE(x, d.next_u64());
}

TEST(Rng, UniformOpenInterval) {
  Rng r(1, 0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, NormalMoments) {
  Rng r(2, 0);
  const int n = 400000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, ExponentialMean) {
  Rng r(3, 0);
  const int n = 400000;
  double s = 0;
  for (int i = 0; i < n; ++i) s += r.exponential(2.0);
  EXPECT_NEAR(s / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}
