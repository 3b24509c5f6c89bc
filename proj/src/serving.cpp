#include "cocache/serving.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cocache/error.hpp"

namespace cocache {
namespace {

void check_dims(const RequestBatch& counts, const CachingAction& a_t,
                const CachingAction& a_prev) {
  if (counts.size() != a_t.size() || a_t.size() != a_prev.size()) {
    throw std::invalid_argument("traffic inputs have mismatched dimensions");
  }
}

std::uint64_t random_subset(int size, int of, Rng& rng) {
  // Partial Fisher-Yates over fragment ids 0..of-1.
  int ids[64];
  std::iota(ids, ids + of, 0);
  std::uint64_t mask = 0;
  for (int k = 0; k < size; ++k) {
    std::uniform_int_distribution<int> pick(k, of - 1);
    std::swap(ids[k], ids[pick(rng)]);
    mask |= std::uint64_t{1} << ids[k];
  }
  return mask;
}

}  // namespace

SlotTraffic account_mds(const RequestBatch& counts, const CachingAction& a_t,
                        const CachingAction& a_prev, const SystemParams& params) {
  check_dims(counts, a_t, a_prev);
  SlotTraffic traffic;
  traffic.total = static_cast<double>(counts.total());
  const PopularityProfile theta = compute_popularity(counts);
  traffic.complement_cost = traffic.total * miss_fraction(theta.theta, a_t, params);
  traffic.update_cost = update_traffic(a_t, a_prev, params);
  traffic.sbs_direct = traffic.total - traffic.complement_cost;
  return traffic;
}

UncodedFragmentStore::UncodedFragmentStore(const SystemParams& params)
    : params_(params),
      masks_(static_cast<std::size_t>(params.sbs_count) * params.catalog_size, 0),
      scratch_(params.sbs_count) {
  if (params.levels > 64) throw ConfigError("uncoded accounting supports L <= 64");
  std::iota(scratch_.begin(), scratch_.end(), 0);
}

void UncodedFragmentStore::place(const CachingAction& action, Rng& rng) {
  const std::size_t catalog = static_cast<std::size_t>(params_.catalog_size);
  if (action.size() != catalog) throw std::invalid_argument("action dimension mismatch");
  const bool first = placed_levels_.empty();
  if (first) placed_levels_.assign(catalog, 0);
  for (std::size_t c = 0; c < catalog; ++c) {
    const int level = action.levels[c];
    if (!first && level == placed_levels_[c]) continue;
    for (int s = 0; s < params_.sbs_count; ++s) {
      masks_[s * catalog + c] = random_subset(level, params_.levels, rng);
    }
    placed_levels_[c] = level;
  }
}

double UncodedFragmentStore::served_fraction(std::size_t content,
                                             std::span<const int> serving) const {
  const std::size_t catalog = static_cast<std::size_t>(params_.catalog_size);
  std::uint64_t merged = 0;
  for (int s : serving) merged |= masks_[s * catalog + content];
  return static_cast<double>(std::popcount(merged)) / params_.levels;
}

SlotTraffic UncodedFragmentStore::account(const RequestBatch& counts, const CachingAction& a_t,
                                          const CachingAction& a_prev, Rng& rng) {
  check_dims(counts, a_t, a_prev);
  place(a_t, rng);
  const int d = params_.serving_set;
  const int p = params_.sbs_count;
  SlotTraffic traffic;
  traffic.total = static_cast<double>(counts.total());
  traffic.update_cost = update_traffic(a_t, a_prev, params_);
  double complement = 0.0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    const std::int64_t n = counts.counts[c];
    if (n == 0) continue;
    const int level = a_t.levels[c];
    if (level == 0) {
      complement += static_cast<double>(n);
      continue;
    }
    if (level == params_.levels) continue;  // every SBS holds every fragment
    for (std::int64_t r = 0; r < n; ++r) {
      for (int k = 0; k < d; ++k) {
        std::uniform_int_distribution<int> pick(k, p - 1);
        std::swap(scratch_[k], scratch_[pick(rng)]);
      }
      complement += 1.0 - served_fraction(c, std::span<const int>(scratch_.data(), d));
    }
  }
  traffic.complement_cost = complement;
  traffic.sbs_direct = traffic.total - traffic.complement_cost;
  return traffic;
}

SlotTraffic account_uncoded(const RequestBatch& counts, const CachingAction& a_t,
                            const CachingAction& a_prev, const SystemParams& params,
                            Rng& rng) {
  UncodedFragmentStore store(params);
  return store.account(counts, a_t, a_prev, rng);
}

double expected_uncoded_fraction(int level, int levels, int serving_set) {
  const double missing = static_cast<double>(levels - level) / levels;
  return 1.0 - std::pow(missing, serving_set);
}

double direct_ratio(std::span<const SlotTraffic> history) {
  if (history.empty()) throw std::invalid_argument("direct_ratio of an empty history");
  double direct = 0.0;
  double total = 0.0;
  for (const SlotTraffic& t : history) {
    direct += t.sbs_direct;
    total += t.total;
  }
  if (total <= 0.0) throw std::invalid_argument("direct_ratio with zero traffic");
  return direct / total;
}

}  // namespace cocache
