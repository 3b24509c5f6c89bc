#pragma once

// Per-slot traffic accounting for the two fragment-caching disciplines.

#include <cstdint>
#include <span>
#include <vector>

#include "cocache/core.hpp"

namespace cocache {

// All fields in content-size units. total is the number of requests;
// sbs_direct = total - complement_cost.
struct SlotTraffic {
  double total = 0.0;
  double sbs_direct = 0.0;
  double update_cost = 0.0;
  double complement_cost = 0.0;
};

// MDS coded fragments: the d serving SBSs hold disjoint parity packets, so a
// request for content j needs max(1 - d a_j, 0) from the MBS.
SlotTraffic account_mds(const RequestBatch& counts, const CachingAction& a_t,
                        const CachingAction& a_prev, const SystemParams& params);

// Uncoded random fragments. Every content is cut into L equal fragments; each
// SBS keeps its own uniformly random subset of levels_i of them, redrawn only
// when levels_i changes. A request is served by a uniformly random d-subset
// of SBSs and gets the union of what they hold.
class UncodedFragmentStore {
 public:
  explicit UncodedFragmentStore(const SystemParams& params);

  // Re-places the fragments of every content whose level differs from the
  // current placement. The first call places everything.
  void place(const CachingAction& action, Rng& rng);

  // Union of the fragments of `content` held by `serving` SBSs, over L.
  double served_fraction(std::size_t content, std::span<const int> serving) const;

  // Places a_t, then serves counts request by request.
  SlotTraffic account(const RequestBatch& counts, const CachingAction& a_t,
                      const CachingAction& a_prev, Rng& rng);

  const SystemParams& params() const { return params_; }

 private:
  SystemParams params_;
  std::vector<int> placed_levels_;  // empty until the first placement
  // fragment bitmask per [sbs * C + content]
  std::vector<std::uint64_t> masks_;
  std::vector<int> scratch_;
};

// One-shot form: fresh placement of a_t, then serve.
SlotTraffic account_uncoded(const RequestBatch& counts, const CachingAction& a_t,
                            const CachingAction& a_prev, const SystemParams& params, Rng& rng);

// E[served fraction] for level l of L under d independent uniform
// l-subsets: 1 - ((L - l) / L)^d.
double expected_uncoded_fraction(int level, int levels, int serving_set);

// rho = sum sbs_direct / sum total. Throws std::invalid_argument on an empty
// history or zero total traffic.
double direct_ratio(std::span<const SlotTraffic> history);

}  // namespace cocache
