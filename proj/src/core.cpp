#include "cocache/core.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "cocache/error.hpp"

namespace cocache {

int SystemParams::max_level() const {
  return (levels + serving_set - 1) / serving_set;
}

void SystemParams::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("invalid system parameters: " + what);
  };
  require(sbs_count >= 1, "p must be >= 1");
  require(catalog_size >= 1, "C must be >= 1");
  require(cache_capacity >= 1, "K must be >= 1");
  require(levels >= 1, "L must be >= 1");
  require(serving_set >= 1 && serving_set <= sbs_count, "d must lie in [1, p]");
  require(content_size > 0.0, "B must be positive");
  require(requests_per_slot >= 1, "M must be >= 1");
  if (static_cast<long long>(level_budget()) >
      static_cast<long long>(catalog_size) * max_level()) {
    throw InfeasibleError("empty action space: K*L = " + std::to_string(level_budget()) +
                          " exceeds C*ceil(L/d) = " +
                          std::to_string(catalog_size * max_level()));
  }
}

int CachingAction::total() const { return std::accumulate(levels.begin(), levels.end(), 0); }

std::int64_t RequestBatch::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

PopularityProfile compute_popularity(const RequestBatch& counts) {
  const std::int64_t total = counts.total();
  if (total <= 0) throw std::invalid_argument("empty slot");
  PopularityProfile profile;
  profile.theta.reserve(counts.size());
  const double denom = static_cast<double>(total);
  for (std::int64_t n : counts.counts) {
    if (n < 0) throw std::invalid_argument("negative request count");
    profile.theta.push_back(static_cast<double>(n) / denom);
  }
  return profile;
}

double mds_parity_bits(const SystemParams& params) {
  return (params.sbs_count + 1) * params.content_size;
}

double complementary_fraction(double cached_fraction, int serving_set) {
  const double rest = 1.0 - serving_set * cached_fraction;
  return rest > 0.0 ? rest : 0.0;
}

std::vector<double> action_to_fractions(const CachingAction& action, int levels) {
  std::vector<double> out;
  out.reserve(action.size());
  for (int l : action.levels) out.push_back(static_cast<double>(l) / levels);
  return out;
}

double update_traffic(const CachingAction& a_t, const CachingAction& a_prev,
                      const SystemParams& params) {
  if (a_t.size() != a_prev.size()) {
    throw std::invalid_argument("action dimension mismatch");
  }
  double grown = 0.0;
  for (std::size_t i = 0; i < a_t.size(); ++i) {
    const int delta = a_t.levels[i] - a_prev.levels[i];
    if (delta > 0) grown += static_cast<double>(delta) / params.levels;
  }
  return params.sbs_count * grown;
}

double miss_fraction(std::span<const double> theta, const CachingAction& action,
                     const SystemParams& params) {
  if (theta.size() != action.size()) {
    throw std::invalid_argument("profile/action dimension mismatch");
  }
  double miss = 0.0;
  for (std::size_t j = 0; j < theta.size(); ++j) {
    const double a = static_cast<double>(action.levels[j]) / params.levels;
    miss += theta[j] * complementary_fraction(a, params.serving_set);
  }
  return miss;
}

double compute_reward(const RequestBatch& counts_next, const CachingAction& a_t,
                      const CachingAction& a_prev, const SystemParams& params) {
  if (counts_next.size() != a_t.size() || a_t.size() != a_prev.size()) {
    throw std::invalid_argument("reward inputs have mismatched dimensions");
  }
  const PopularityProfile theta = compute_popularity(counts_next);
  const double total = static_cast<double>(counts_next.total());
  const double complement = total * miss_fraction(theta.theta, a_t, params);
  return (total - complement) - update_traffic(a_t, a_prev, params);
}

}  // namespace cocache
