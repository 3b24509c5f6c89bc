#pragma once

// Shared vocabulary: scenario constants, caching actions, popularity profiles,
// request batches, and the per-slot reward of MDS coded cooperative caching.
//
// Traffic is measured in content-size units throughout (every load is divided
// by the content size B), so B only matters for the parity-bit count.

#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace cocache {

using Rng = std::mt19937_64;

struct SystemParams {
  int sbs_count = 20;          // p
  int catalog_size = 10;       // C
  int cache_capacity = 1;      // K, in whole contents
  int serving_set = 2;         // d, SBSs cooperatively serving one user
  int levels = 3;              // L, discretization levels per unit fraction
  double content_size = 1.0;   // B
  int requests_per_slot = 1000;  // M

  // Largest admissible level, ceil(L/d).
  int max_level() const;
  // K*L, the sum every action's levels must reach.
  int level_budget() const { return cache_capacity * levels; }

  // Throws ConfigError on out-of-range fields and InfeasibleError when no
  // valid action exists (K*L > C*ceil(L/d)).
  void validate() const;

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

// Integer-level caching decision: content i keeps levels[i]/L of its size at
// every SBS.
struct CachingAction {
  std::vector<int> levels;
  int max_level = 0;

  std::size_t size() const { return levels.size(); }
  int total() const;

  friend bool operator==(const CachingAction& a, const CachingAction& b) {
    return a.levels == b.levels;
  }
  friend auto operator<=>(const CachingAction& a, const CachingAction& b) {
    return a.levels <=> b.levels;
  }
};

struct PopularityProfile {
  std::vector<double> theta;
  std::size_t size() const { return theta.size(); }
};

struct RequestBatch {
  std::vector<std::int64_t> counts;
  std::size_t size() const { return counts.size(); }
  std::int64_t total() const;
};

struct EnvObservation {
  PopularityProfile theta;
  CachingAction prev_action;
  RequestBatch counts;
  // Index of the popularity candidate that generated `counts`; only set when
  // the environment runs in white-box mode.
  std::optional<std::size_t> candidate_index;
};

// Normalized request frequencies. Throws std::invalid_argument("empty slot")
// when every count is zero.
PopularityProfile compute_popularity(const RequestBatch& counts);

// Number of MDS parity bits generated per content, (p+1)B.
double mds_parity_bits(const SystemParams& params);

// Share of a content the MBS still has to send after d SBSs each deliver a
// fraction a_c of it: max(1 - d*a_c, 0).
double complementary_fraction(double cached_fraction, int serving_set);

std::vector<double> action_to_fractions(const CachingAction& action, int levels);

// Reward of one slot: requests served without the MBS, minus the off-peak
// traffic spent updating the SBS caches from a_prev to a_t.
//
//   R = sum N_i - sum N_i * sum_j theta_j max(1 - d a_j, 0)
//       - p * sum_i max(a_i - a_prev_i, 0)
//
// theta is derived from counts_next. Throws std::invalid_argument on a
// dimension mismatch.
double compute_reward(const RequestBatch& counts_next, const CachingAction& a_t,
                      const CachingAction& a_prev, const SystemParams& params);

// Cache-update traffic p * sum_i max(a_i - a_prev_i, 0), in content units.
double update_traffic(const CachingAction& a_t, const CachingAction& a_prev,
                      const SystemParams& params);

// Expected fraction of a request that misses the SBSs, sum_j theta_j max(1 - d a_j, 0).
double miss_fraction(std::span<const double> theta, const CachingAction& action,
                     const SystemParams& params);

}  // namespace cocache
