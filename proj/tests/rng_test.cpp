#include <gtest/gtest.h>

#include <map>
#include <numeric>

#include "rearrange/rng.hpp"

namespace rearrange {
namespace {

TEST(HashTest, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(fnv1a64("bar", fnv1a64("foo")), fnv1a64("foobar"));
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(SeedTest, DerivedSeedsDiffer) {
  EXPECT_EQ(derive_seed(7, {1, 2}), derive_seed(7, {1, 2}));
  EXPECT_NE(derive_seed(7, {1, 2}), derive_seed(7, {2, 1}));
  EXPECT_NE(derive_seed(7, {1}), derive_seed(7, {1, 0}));
  EXPECT_NE(derive_seed(7, {0}), derive_seed(8, {0}));
}

TEST(RngTest, EngineMatchesStandardSequence) {
  Rng rng(5489);
  EXPECT_EQ(rng.next(), 14514284786278117030ULL);
}

TEST(RngTest, UniformIntCoversRangeEvenly) {
  Rng rng(3);
  std::map<int, int> counts;
  for (int i = 0; i < 60000; ++i) ++counts[rng.uniform_int(-2, 3)];
  ASSERT_EQ(counts.size(), 6u);
  EXPECT_EQ(counts.begin()->first, -2);
  EXPECT_EQ(counts.rbegin()->first, 3);
  for (const auto& [v, n] : counts) EXPECT_NEAR(n, 10000, 400) << v;
  EXPECT_EQ(rng.uniform_int(4, 4), 4);
  EXPECT_THROW(rng.uniform_int(5, 4), std::invalid_argument);
}

TEST(RngTest, UniformAndBinomialMoments) {
  Rng rng(11);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
  double bsum = 0.0;
  for (int i = 0; i < 20000; ++i) bsum += rng.binomial(16, 0.25);
  EXPECT_NEAR(bsum / 20000, 4.0, 0.05);
}

TEST(RngTest, ShuffleIsAPermutation) {
  Rng rng(1);
  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  std::vector<int> w = v;
  rng.shuffle(w);
  EXPECT_NE(v, w);
  std::sort(w.begin(), w.end());
  EXPECT_EQ(v, w);
}

TEST(Q9Test, RoundsToNineDigits) {
  EXPECT_EQ(q9(0.1234567891234), 0.123456789);
  EXPECT_EQ(q9(1.0), 1.0);
  EXPECT_EQ(q9(q9(3.14159265358979)), q9(3.14159265358979));
  EXPECT_FALSE(std::signbit(q9(-0.0)));
}

}  // namespace
}  // namespace rearrange
