#include <gtest/gtest.h>

#include <cmath>

#include "cocache/core.hpp"
#include "cocache/serving.hpp"

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

}  // namespace

TEST(Mds, HandExample) {
  const auto s = params(2, 2, 1, 2, 2);
  const auto t = account_mds({{10, 5}}, {{1, 0}, 1}, {{0, 0}, 1}, s);
  EXPECT_DOUBLE_EQ(t.total, 15.0);
  EXPECT_NEAR(t.sbs_direct, 10.0, 1e-12);
  EXPECT_NEAR(t.complement_cost, 5.0, 1e-12);
  EXPECT_NEAR(t.update_cost, 1.0, 1e-12);
  // Reward identity: R = sbs_direct - update_cost.
  EXPECT_NEAR(t.sbs_direct - t.update_cost,
              compute_reward({{10, 5}}, {{1, 0}, 1}, {{0, 0}, 1}, s), 1e-12);
}

TEST(Mds, RewardIdentityProperty) {
  Rng rng(21);
  const auto s = params(7, 6, 2, 3, 5);
  std::uniform_int_distribution<int> n(0, 40);
  std::uniform_int_distribution<int> lv(0, s.max_level());
  for (int trial = 0; trial < 1000; ++trial) {
    RequestBatch b;
    CachingAction a{{}, s.max_level()}, prev{{}, s.max_level()};
    for (int i = 0; i < 6; ++i) {
      b.counts.push_back(n(rng));
      a.levels.push_back(lv(rng));
      prev.levels.push_back(lv(rng));
    }
    b.counts[2] += 1;
    const auto t = account_mds(b, a, prev, s);
    EXPECT_NEAR(t.sbs_direct - t.update_cost, compute_reward(b, a, prev, s), 1e-9);
    EXPECT_NEAR(t.sbs_direct + t.complement_cost, t.total, 1e-9);
  }
}

TEST(Uncoded, FullAndEmptyLevels) {
  Rng rng(1);
  const auto s = params(6, 3, 1, 2, 4);
  const auto t = account_uncoded({{7, 3, 2}}, {{4, 0, 0}, 4}, {{4, 0, 0}, 4}, s, rng);
  EXPECT_DOUBLE_EQ(t.sbs_direct, 7.0);
  EXPECT_DOUBLE_EQ(t.complement_cost, 5.0);
  EXPECT_DOUBLE_EQ(t.update_cost, 0.0);
}

TEST(Uncoded, ExpectedFractionFormula) {
  EXPECT_DOUBLE_EQ(expected_uncoded_fraction(1, 2, 2), 0.75);
  EXPECT_DOUBLE_EQ(expected_uncoded_fraction(0, 3, 2), 0.0);
  EXPECT_DOUBLE_EQ(expected_uncoded_fraction(3, 3, 1), 1.0);
}

TEST(Uncoded, MonteCarloMatchesExpectation) {
  // Level 1 of 2 with d = 2: each fragment misses one SBS with probability 1/2.
  const auto s = params(10, 2, 1, 2, 2);
  Rng rng(99);
  const CachingAction a{{1, 1}, 1};
  const int trials = 4000;
  double served = 0.0;
  for (int t = 0; t < trials; ++t) {
    served += account_uncoded({{10, 0}}, a, a, s, rng).sbs_direct / 10.0;
  }
  // Per-placement mean lies in [1/2, 1], so its variance is at most 1/16.
  EXPECT_NEAR(served / trials, 0.75, 3.0 * std::sqrt(1.0 / 16.0 / trials));
}

TEST(Uncoded, NeverBeatsMdsInExpectation) {
  for (int l = 2; l <= 6; ++l) {
    for (int d = 1; d <= 4; ++d) {
      for (int level = 0; level <= l; ++level) {
        const double mds = 1.0 - std::max(1.0 - d * static_cast<double>(level) / l, 0.0);
        EXPECT_LE(expected_uncoded_fraction(level, l, d), mds + 1e-12);
      }
    }
  }
}

TEST(Uncoded, SameLevelsKeepPlacement) {
  const auto s = params(4, 2, 1, 1, 4);
  Rng rng(5);
  UncodedFragmentStore store(s);
  const CachingAction a{{2, 2}, 4};
  store.place(a, rng);
  std::vector<double> before;
  for (int sbs = 0; sbs < 4; ++sbs) {
    const int one[] = {sbs};
    before.push_back(store.served_fraction(0, one));
    EXPECT_DOUBLE_EQ(before.back(), 0.5);
  }
  const int all[] = {0, 1, 2, 3};
  const double union_before = store.served_fraction(0, all);
  store.place(a, rng);
  EXPECT_DOUBLE_EQ(store.served_fraction(0, all), union_before);
}

TEST(Uncoded, RejectsTooManyLevels) {
  EXPECT_THROW(UncodedFragmentStore(params(4, 2, 1, 1, 65)), std::exception);
}

TEST(DirectRatio, Examples) {
  std::vector<SlotTraffic> h{{10, 8, 1, 2}, {10, 6, 0, 4}};
  EXPECT_DOUBLE_EQ(direct_ratio(h), 0.7);
  std::vector<SlotTraffic> one{{15, 10, 1, 5}};
  EXPECT_NEAR(direct_ratio(one), 2.0 / 3.0, 1e-15);
}

TEST(DirectRatio, Errors) {
  std::vector<SlotTraffic> empty;
  EXPECT_THROW(direct_ratio(empty), std::invalid_argument);
  std::vector<SlotTraffic> zero{{0, 0, 0, 0}};
  EXPECT_THROW(direct_ratio(zero), std::invalid_argument);
}
