#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/binomial.hpp>
#include <map>
#include <set>

#include "cocache/actions.hpp"
#include "cocache/error.hpp"

using namespace cocache;

namespace {

SystemParams params(int c, int k, int l, int d) {
  SystemParams s;
  s.sbs_count = 20;
  s.catalog_size = c;
  s.cache_capacity = k;
  s.levels = l;
  s.serving_set = d;
  return s;
}

// sum_j (-1)^j C(C, j) C(S - j (m + 1) + C - 1, C - 1)
double inclusion_exclusion(int c, int s, int m) {
  double total = 0.0;
  for (int j = 0; j <= c; ++j) {
    const int top = s - j * (m + 1) + c - 1;
    if (top < c - 1) break;
    const double term = boost::math::binomial_coefficient<double>(c, j) *
                        boost::math::binomial_coefficient<double>(top, c - 1);
    total += (j % 2 ? -term : term);
  }
  return total;
}

// Every vector in [0, cap]^C, filtered.
std::vector<std::vector<int>> brute_force(const SystemParams& s, Granularity g) {
  std::vector<std::vector<int>> out;
  const int cap = s.max_level();
  std::vector<int> v(s.catalog_size, 0);
  while (true) {
    CachingAction a{v, cap};
    if (validate(a, s, g)) out.push_back(v);
    int i = s.catalog_size - 1;
    while (i >= 0 && v[i] == cap) v[i--] = 0;
    if (i < 0) break;
    ++v[i];
  }
  return out;
}

}  // namespace

TEST(Lmax, Examples) {
  EXPECT_EQ(lmax(3, 2), 2);
  EXPECT_EQ(lmax(6, 3), 2);
  EXPECT_EQ(lmax(4, 1), 4);
}

TEST(Enumerate, TableOneCount) {
  const auto space = ActionSpace::enumerate(params(10, 1, 3, 2));
  EXPECT_EQ(space.size(), 210u);
  EXPECT_DOUBLE_EQ(count_actions(params(10, 1, 3, 2)), 210.0);
}

TEST(Enumerate, SmallExamples) {
  const auto space = ActionSpace::enumerate(params(3, 1, 2, 2));
  ASSERT_EQ(space.size(), 3u);
  EXPECT_EQ(space[0].levels, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(space[1].levels, (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(space[2].levels, (std::vector<int>{1, 1, 0}));

  const auto nc = ActionSpace::enumerate(params(2, 1, 2, 1), Granularity::kFullContent);
  ASSERT_EQ(nc.size(), 2u);
  EXPECT_EQ(nc[0].levels, (std::vector<int>{0, 2}));
  EXPECT_EQ(nc[1].levels, (std::vector<int>{2, 0}));
}

TEST(Enumerate, MatchesBruteForceAndFormula) {
  const std::vector<SystemParams> cases{params(10, 1, 3, 2), params(3, 1, 2, 2), params(5, 2, 3, 2),
                                        params(6, 1, 4, 3), params(4, 2, 2, 1), params(7, 2, 3, 3),
                                        params(5, 3, 2, 1)};
  for (const auto& s : cases) {
    const auto space = ActionSpace::enumerate(s);
    const auto brute = brute_force(s, Granularity::kFractional);
    ASSERT_EQ(space.size(), brute.size());
    for (std::size_t k = 0; k < space.size(); ++k) EXPECT_EQ(space[k].levels, brute[k]);
    EXPECT_DOUBLE_EQ(static_cast<double>(space.size()),
                     inclusion_exclusion(s.catalog_size, s.level_budget(), s.max_level()));
    EXPECT_DOUBLE_EQ(count_actions(s), static_cast<double>(space.size()));
  }
}

TEST(Enumerate, FullContentIsBinomial) {
  for (int c = 2; c <= 8; ++c) {
    for (int k = 1; k <= c; ++k) {
      const auto space = ActionSpace::enumerate(params(c, k, 3, 1), Granularity::kFullContent);
      EXPECT_DOUBLE_EQ(static_cast<double>(space.size()),
                       boost::math::binomial_coefficient<double>(c, k));
    }
  }
}

TEST(Enumerate, FullContentNeedsNoCooperation) {
  EXPECT_THROW(ActionSpace::enumerate(params(4, 1, 3, 2), Granularity::kFullContent), ConfigError);
}

TEST(Enumerate, IndexRoundTripAndNoDuplicates) {
  const auto space = ActionSpace::enumerate(params(7, 2, 3, 2));
  std::set<std::vector<int>> seen;
  for (std::size_t k = 0; k < space.size(); ++k) {
    EXPECT_EQ(space.index(space[k]), k);
    EXPECT_TRUE(validate(space[k], space.params()));
    EXPECT_TRUE(seen.insert(space[k].levels).second);
    if (k > 0) {
      EXPECT_LT(space[k - 1], space[k]);
    }
  }
  EXPECT_THROW(space.index(CachingAction{{3, 0, 0, 0, 0, 0, 3}, 2}), std::out_of_range);
  EXPECT_FALSE(space.find(CachingAction{{1, 1, 1, 1, 1, 0, 0}, 2}).has_value());
}

TEST(Enumerate, Deterministic) {
  const auto a = ActionSpace::enumerate(params(6, 2, 3, 2));
  const auto b = ActionSpace::enumerate(params(6, 2, 3, 2));
  EXPECT_EQ(a.actions(), b.actions());
}

TEST(Enumerate, CapAndInfeasible) {
  EXPECT_THROW(ActionSpace::enumerate(params(20, 4, 3, 2), Granularity::kFractional, 1000),
               InfeasibleError);
  EXPECT_THROW(ActionSpace::enumerate(params(2, 3, 3, 2)), InfeasibleError);
}

TEST(FirstAction, IsLexicographicMinimum) {
  const auto s = params(5, 2, 3, 2);
  EXPECT_EQ(first_action(s), ActionSpace::enumerate(s)[0]);
  EXPECT_EQ(first_action(s).levels, (std::vector<int>{0, 0, 2, 2, 2}));
}

TEST(Validate, Examples) {
  const auto s = params(10, 1, 3, 2);
  std::vector<int> v(10, 0);
  v[0] = 2;
  v[1] = 1;
  EXPECT_TRUE(validate({v, 2}, s));
  std::fill(v.begin(), v.end(), 0);
  v[0] = 3;
  EXPECT_FALSE(validate({v, 2}, s));
  v[0] = 1;
  v[1] = 1;
  EXPECT_FALSE(validate({v, 2}, s));
}

TEST(Sampler, CountMatchesLargeSpace) {
  // C=20, K=4: far too large to enumerate under a small cap, counted by DP.
  const auto s = params(20, 4, 3, 2);
  EXPECT_DOUBLE_EQ(CompositionSampler(s, Granularity::kFractional).count(),
                   inclusion_exclusion(20, 12, 2));
}

TEST(Sampler, SingleActionSpace) {
  Rng rng(5);
  const auto s = params(1, 1, 1, 1);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_uniform(s, Granularity::kFractional, rng).levels,
                                         std::vector<int>{1});
}

TEST(Sampler, ThreeActionFrequencies) {
  Rng rng(17);
  const auto s = params(3, 1, 2, 2);
  const auto space = ActionSpace::enumerate(s);
  std::vector<int> hits(space.size(), 0);
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) ++hits[space.index(sample_uniform(s, Granularity::kFractional, rng))];
  for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / draws, 1.0 / 3.0, 0.02);
}

TEST(Sampler, ChiSquareUniformOverLattice) {
  Rng rng(23);
  const auto s = params(5, 2, 3, 2);
  const auto space = ActionSpace::enumerate(s);
  const CompositionSampler sampler(s, Granularity::kFractional);
  std::vector<double> hits(space.size(), 0.0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto a = sampler.sample(rng);
    ASSERT_TRUE(validate(a, s));
    hits[space.index(a)] += 1.0;
  }
  const double expected = static_cast<double>(draws) / space.size();
  double stat = 0.0;
  for (double h : hits) stat += (h - expected) * (h - expected) / expected;
  boost::math::chi_squared dist(static_cast<double>(space.size() - 1));
  EXPECT_LT(stat, boost::math::quantile(dist, 0.99));
}

TEST(Sampler, FullContentDraws) {
  Rng rng(29);
  const auto s = params(6, 2, 3, 1);
  std::map<std::vector<int>, int> hits;
  for (int i = 0; i < 15000; ++i) {
    const auto a = sample_uniform(s, Granularity::kFullContent, rng);
    ASSERT_TRUE(validate(a, s, Granularity::kFullContent));
    ++hits[a.levels];
  }
  EXPECT_EQ(hits.size(), 15u);
}
