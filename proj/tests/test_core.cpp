#include <gtest/gtest.h>

#include <random>

#include "cocache/core.hpp"
#include "cocache/error.hpp"

using namespace cocache;

namespace {

SystemParams params(int p, int c, int k, int d, int l) {
  SystemParams s;
  s.sbs_count = p;
  s.catalog_size = c;
  s.cache_capacity = k;
  s.serving_set = d;
  s.levels = l;
  return s;
}

CachingAction act(std::vector<int> levels, int max_level) { return {std::move(levels), max_level}; }

}  // namespace

TEST(Popularity, Normalizes) {
  auto p = compute_popularity({{3, 1, 0, 0}});
  EXPECT_DOUBLE_EQ(p.theta[0], 0.75);
  EXPECT_DOUBLE_EQ(p.theta[1], 0.25);
  EXPECT_DOUBLE_EQ(p.theta[3], 0.0);
  EXPECT_DOUBLE_EQ(compute_popularity({{5}}).theta[0], 1.0);
  auto q = compute_popularity({{10, 5}});
  EXPECT_NEAR(q.theta[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(q.theta[1], 1.0 / 3.0, 1e-15);
}

TEST(Popularity, EmptySlotThrows) {
  EXPECT_THROW(compute_popularity({{0, 0, 0}}), std::invalid_argument);
}

TEST(Popularity, SumsToOne) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> n(0, 50);
  for (int trial = 0; trial < 200; ++trial) {
    RequestBatch b;
    for (int i = 0; i < 17; ++i) b.counts.push_back(n(rng));
    b.counts[0] += 1;
    double sum = 0.0;
    for (double t : compute_popularity(b).theta) sum += t;
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(Parity, Bits) {
  EXPECT_DOUBLE_EQ(mds_parity_bits(params(20, 10, 1, 2, 3)), 21.0);
  EXPECT_DOUBLE_EQ(mds_parity_bits(params(1, 10, 1, 1, 3)), 2.0);
  auto s = params(50, 100, 5, 3, 6);
  s.content_size = 2.0;
  EXPECT_DOUBLE_EQ(mds_parity_bits(s), 102.0);
}

TEST(ComplementaryFraction, Examples) {
  EXPECT_DOUBLE_EQ(complementary_fraction(0.5, 2), 0.0);
  EXPECT_DOUBLE_EQ(complementary_fraction(0.0, 3), 1.0);
  EXPECT_NEAR(complementary_fraction(1.0 / 6.0, 3), 0.5, 1e-15);
}

TEST(ComplementaryFraction, ZeroIffCovered) {
  for (int d = 1; d <= 4; ++d) {
    for (int l = 0; l <= 12; ++l) {
      const double a = l / 12.0;
      EXPECT_EQ(complementary_fraction(a, d) == 0.0, d * l >= 12) << d << ' ' << l;
    }
  }
}

TEST(Reward, HandExample) {
  const auto s = params(2, 2, 1, 2, 2);
  // a_t = [0.5, 0] as levels of L = 2.
  const double r = compute_reward({{10, 5}}, act({1, 0}, 1), act({0, 0}, 1), s);
  EXPECT_NEAR(r, 9.0, 1e-12);
}

TEST(Reward, FullHitNoUpdate) {
  const auto s = params(1, 1, 1, 1, 1);
  EXPECT_DOUBLE_EQ(compute_reward({{100}}, act({1}, 1), act({1}, 1), s), 100.0);
}

TEST(Reward, NothingCachedIsZero) {
  const auto s = params(3, 3, 1, 2, 2);
  EXPECT_DOUBLE_EQ(compute_reward({{4, 7, 1}}, act({0, 0, 0}, 1), act({0, 0, 0}, 1), s), 0.0);
}

TEST(Reward, DimensionMismatchThrows) {
  const auto s = params(2, 2, 1, 2, 2);
  EXPECT_THROW(compute_reward({{1, 2, 3}}, act({1, 0}, 1), act({1, 0}, 1), s),
               std::invalid_argument);
}

TEST(Reward, NeverExceedsTotalAndMonotone) {
  std::mt19937_64 rng(11);
  const auto s = params(5, 6, 2, 2, 4);
  std::uniform_int_distribution<int> n(0, 30);
  std::uniform_int_distribution<int> lv(0, 2);
  for (int trial = 0; trial < 500; ++trial) {
    RequestBatch b;
    CachingAction a{{}, 2}, prev{{}, 2};
    for (int i = 0; i < 6; ++i) {
      b.counts.push_back(n(rng));
      a.levels.push_back(lv(rng));
      prev.levels.push_back(lv(rng));
    }
    b.counts[0] += 1;
    const double r = compute_reward(b, a, prev, s);
    EXPECT_LE(r, static_cast<double>(b.total()) + 1e-9);
    // Raising a_prev towards a_t can only lower the update cost.
    CachingAction closer = prev;
    for (int i = 0; i < 6; ++i) closer.levels[i] = std::max(prev.levels[i], a.levels[i]);
    EXPECT_GE(compute_reward(b, a, closer, s), r - 1e-9);
  }
}

TEST(Reward, FullCoverageEqualsTotal) {
  const auto s = params(4, 3, 2, 2, 2);
  const auto a = act({1, 1, 1}, 1);  // a_i = 1/2, d a_i = 1
  EXPECT_DOUBLE_EQ(compute_reward({{9, 3, 8}}, a, a, s), 20.0);
}

TEST(Fractions, Convert) {
  auto f = action_to_fractions(act({2, 1, 0}, 2), 3);
  EXPECT_NEAR(f[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f[1], 1.0 / 3.0, 1e-15);
  EXPECT_EQ(f[2], 0.0);
  std::vector<int> levels(20, 0);
  for (int i = 0; i < 15; ++i) levels[i] = 2;
  auto g = action_to_fractions(act(levels, 2), 6);
  for (int i = 0; i < 15; ++i) EXPECT_NEAR(g[i], 1.0 / 3.0, 1e-15);
  for (int i = 15; i < 20; ++i) EXPECT_EQ(g[i], 0.0);
}

TEST(SystemParams, Validation) {
  EXPECT_NO_THROW(params(20, 10, 1, 2, 3).validate());
  EXPECT_EQ(params(20, 10, 1, 2, 3).max_level(), 2);
  EXPECT_THROW(params(0, 10, 1, 1, 3).validate(), ConfigError);
  EXPECT_THROW(params(2, 10, 1, 3, 3).validate(), ConfigError);
  EXPECT_THROW(params(20, 10, 0, 2, 3).validate(), ConfigError);
  // K L = 9 > C ceil(L/d) = 2 * 2
  EXPECT_THROW(params(20, 2, 3, 2, 3).validate(), InfeasibleError);
}

TEST(UpdateTraffic, CountsOnlyIncreases) {
  const auto s = params(20, 3, 1, 2, 3);
  EXPECT_NEAR(update_traffic(act({2, 1, 0}, 2), act({0, 1, 2}, 2), s), 20.0 * 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(update_traffic(act({2, 1, 0}, 2), act({2, 1, 0}, 2), s), 0.0);
}
