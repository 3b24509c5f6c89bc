#pragma once

// The constrained discrete action space: integer level vectors with
// sum(levels) = K*L and every level <= ceil(L/d). The full-content lattice
// (non-cooperative caching) further restricts each level to {0, L}.

#include <cstddef>
#include <optional>
#include <unordered_map>
#include <vector>

#include "cocache/core.hpp"

namespace cocache {

enum class Granularity { kFractional, kFullContent };

inline constexpr std::size_t kDefaultEnumerationCap = 5'000'000;

// Levels measured in lattice units of `step` levels each.
struct ActionLattice {
  int catalog_size = 0;
  int budget_units = 0;
  int cap_units = 0;
  int step = 1;
  int max_level = 0;
};

// ceil(L/d).
int lmax(int levels, int serving_set);

// Throws InfeasibleError when the lattice is empty, ConfigError when the
// full-content lattice is requested with ceil(L/d) < L.
ActionLattice action_lattice(const SystemParams& params, Granularity granularity);

bool validate(const CachingAction& action, const SystemParams& params,
              Granularity granularity = Granularity::kFractional);

// Number of valid actions. Exact below 2^53, a close approximation above.
double count_actions(const SystemParams& params,
                     Granularity granularity = Granularity::kFractional);

// Lexicographically smallest valid action; mass is packed into the last
// contents.
CachingAction first_action(const SystemParams& params,
                           Granularity granularity = Granularity::kFractional);

// Exact uniform sampling over the lattice by drawing levels one content at a
// time, each conditional on the budget left, weighted by bounded-composition
// counts. Works when the space is far too large to enumerate.
class CompositionSampler {
 public:
  CompositionSampler(const SystemParams& params, Granularity granularity);
  CachingAction sample(Rng& rng) const;
  double count() const { return ways_[0][lattice_.budget_units]; }

 private:
  ActionLattice lattice_;
  // ways_[i][r]: fillings of contents i..C-1 using exactly r units.
  std::vector<std::vector<double>> ways_;
};

class ActionSpace {
 public:
  // Every valid action in ascending lexicographic order. Throws
  // InfeasibleError when the lattice is empty or holds more than size_cap
  // actions.
  static ActionSpace enumerate(const SystemParams& params,
                               Granularity granularity = Granularity::kFractional,
                               std::size_t size_cap = kDefaultEnumerationCap);

  std::size_t size() const { return actions_.size(); }
  const CachingAction& operator[](std::size_t ordinal) const { return actions_[ordinal]; }
  const std::vector<CachingAction>& actions() const { return actions_; }
  const SystemParams& params() const { return params_; }
  Granularity granularity() const { return granularity_; }

  std::optional<std::size_t> find(const CachingAction& action) const;
  // Like find, but throws std::out_of_range for actions outside the space.
  std::size_t index(const CachingAction& action) const;

  // Uniform over the enumerated actions.
  const CachingAction& sample(Rng& rng) const;

 private:
  struct LevelsHash {
    std::size_t operator()(const std::vector<int>& levels) const noexcept;
  };

  SystemParams params_;
  Granularity granularity_ = Granularity::kFractional;
  std::vector<CachingAction> actions_;
  std::unordered_map<std::vector<int>, std::size_t, LevelsHash> index_;
};

// Uniform draw from the lattice without enumerating it.
CachingAction sample_uniform(const SystemParams& params, Granularity granularity, Rng& rng);

}  // namespace cocache
