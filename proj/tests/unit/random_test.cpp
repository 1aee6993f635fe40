#include <gtest/gtest.h>

#include <cmath>

#include "nimbus/random.hpp"

using nimbus::RandomStream;

// The standard fixes the 10000th output of a default-seeded mt19937_64.
TEST(RandomStream, EngineMatchesStandardReference) {
  RandomStream rng(5489u);
  for (int i = 0; i < 9999; ++i) rng.next_u64();
  EXPECT_EQ(rng.next_u64(), 9981545732273789042ull);
}

TEST(RandomStream, UniformUsesTop53Bits) {
  RandomStream a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double expected = static_cast<double>(b.next_u64() >> 11) / 9007199254740992.0;
    const double u = a.uniform();
    EXPECT_EQ(u, expected);
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(RandomStream, SameSeedSameStream) {
  RandomStream a(7), b(7), c(8);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.poisson(25);
    EXPECT_EQ(x, b.poisson(25));
    differs |= x != c.poisson(25);
  }
  EXPECT_TRUE(differs);
}

TEST(RandomStream, ExponentialMean) {
  RandomStream rng(1);
  const int n = 200000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(0.5);
  // mean 2, sd 2, so 4 sigma is 4 * 2 / sqrt(n)
  EXPECT_NEAR(sum / n, 2.0, 4 * 2.0 / std::sqrt(n));
}

TEST(RandomStream, PoissonMeanAndVariance) {
  for (double mean : {0.5, 25.0, 250.0, 1500.0}) {
    RandomStream rng(3);
    const int n = 50000;
    double sum = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      const auto k = static_cast<double>(rng.poisson(mean));
      sum += k;
      sq += k * k;
    }
    const double m = sum / n;
    const double var = sq / n - m * m;
    EXPECT_NEAR(m, mean, 4 * std::sqrt(mean / n)) << "mean " << mean;
    EXPECT_NEAR(var / mean, 1.0, 0.05) << "mean " << mean;
  }
}

TEST(RandomStream, PoissonOfZeroIsZero) {
  RandomStream rng(0);
  EXPECT_EQ(rng.poisson(0.0), 0u);
  EXPECT_EQ(rng.poisson(-1.0), 0u);
}
