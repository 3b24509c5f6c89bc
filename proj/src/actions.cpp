#include "cocache/actions.hpp"

#include <algorithm>
#include <string>

#include "cocache/error.hpp"

namespace cocache {
namespace {

std::vector<std::vector<double>> composition_counts(const ActionLattice& lattice) {
  const int n = lattice.catalog_size;
  const int budget = lattice.budget_units;
  std::vector<std::vector<double>> ways(n + 1, std::vector<double>(budget + 1, 0.0));
  ways[n][0] = 1.0;
  for (int i = n - 1; i >= 0; --i) {
    for (int r = 0; r <= budget; ++r) {
      double sum = 0.0;
      for (int v = 0; v <= std::min(lattice.cap_units, r); ++v) sum += ways[i + 1][r - v];
      ways[i][r] = sum;
    }
  }
  return ways;
}

void enumerate_into(const ActionLattice& lattice, std::vector<int>& levels, int position,
                    int remaining, std::vector<CachingAction>& out) {
  const int n = lattice.catalog_size;
  if (position == n) {
    out.push_back(CachingAction{levels, lattice.max_level});
    return;
  }
  const int room_after = lattice.cap_units * (n - position - 1);
  const int lo = std::max(0, remaining - room_after);
  const int hi = std::min(lattice.cap_units, remaining);
  for (int v = lo; v <= hi; ++v) {
    levels[position] = v * lattice.step;
    enumerate_into(lattice, levels, position + 1, remaining - v, out);
  }
  levels[position] = 0;
}

}  // namespace

int lmax(int levels, int serving_set) { return (levels + serving_set - 1) / serving_set; }

ActionLattice action_lattice(const SystemParams& params, Granularity granularity) {
  params.validate();
  ActionLattice lattice;
  lattice.catalog_size = params.catalog_size;
  lattice.max_level = params.max_level();
  if (granularity == Granularity::kFullContent) {
    if (params.max_level() != params.levels) {
      throw ConfigError("full-content caching needs ceil(L/d) = L (use d = 1)");
    }
    lattice.step = params.levels;
    lattice.cap_units = 1;
    lattice.budget_units = params.cache_capacity;
  } else {
    lattice.step = 1;
    lattice.cap_units = params.max_level();
    lattice.budget_units = params.level_budget();
  }
  if (lattice.budget_units > lattice.cap_units * lattice.catalog_size) {
    throw InfeasibleError("empty action space");
  }
  return lattice;
}

bool validate(const CachingAction& action, const SystemParams& params,
              Granularity granularity) {
  if (action.size() != static_cast<std::size_t>(params.catalog_size)) return false;
  const int cap = params.max_level();
  const int step = granularity == Granularity::kFullContent ? params.levels : 1;
  long long sum = 0;
  for (int l : action.levels) {
    if (l < 0 || l > cap || l % step != 0) return false;
    sum += l;
  }
  return sum == params.level_budget();
}

double count_actions(const SystemParams& params, Granularity granularity) {
  const ActionLattice lattice = action_lattice(params, granularity);
  return composition_counts(lattice)[0][lattice.budget_units];
}

CachingAction first_action(const SystemParams& params, Granularity granularity) {
  const ActionLattice lattice = action_lattice(params, granularity);
  CachingAction action{std::vector<int>(lattice.catalog_size, 0), lattice.max_level};
  int remaining = lattice.budget_units;
  for (int i = lattice.catalog_size - 1; i >= 0 && remaining > 0; --i) {
    const int v = std::min(lattice.cap_units, remaining);
    action.levels[i] = v * lattice.step;
    remaining -= v;
  }
  return action;
}

CompositionSampler::CompositionSampler(const SystemParams& params, Granularity granularity)
    : lattice_(action_lattice(params, granularity)), ways_(composition_counts(lattice_)) {}

CachingAction CompositionSampler::sample(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CachingAction action{std::vector<int>(lattice_.catalog_size, 0), lattice_.max_level};
  int remaining = lattice_.budget_units;
  for (int i = 0; i < lattice_.catalog_size; ++i) {
    const double total = ways_[i][remaining];
    double target = unit(rng) * total;
    const int hi = std::min(lattice_.cap_units, remaining);
    int chosen = -1;
    for (int v = 0; v <= hi; ++v) {
      const double w = ways_[i + 1][remaining - v];
      if (w <= 0.0) continue;
      chosen = v;
      if (target < w) break;
      target -= w;
    }
    // chosen is the last feasible value if rounding pushed target past the end.
    action.levels[i] = chosen * lattice_.step;
    remaining -= chosen;
  }
  return action;
}

std::size_t ActionSpace::LevelsHash::operator()(const std::vector<int>& levels) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int l : levels) {
    h ^= static_cast<std::size_t>(l) + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h;
}

ActionSpace ActionSpace::enumerate(const SystemParams& params, Granularity granularity,
                                   std::size_t size_cap) {
  const ActionLattice lattice = action_lattice(params, granularity);
  const double count = composition_counts(lattice)[0][lattice.budget_units];
  if (count < 1.0) throw InfeasibleError("empty action space");
  if (count > static_cast<double>(size_cap)) {
    throw InfeasibleError("action space holds " + std::to_string(count) +
                          " actions, above the enumeration cap of " +
                          std::to_string(size_cap) + "; use the vfa agent");
  }
  ActionSpace space;
  space.params_ = params;
  space.granularity_ = granularity;
  space.actions_.reserve(static_cast<std::size_t>(count));
  std::vector<int> scratch(lattice.catalog_size, 0);
  enumerate_into(lattice, scratch, 0, lattice.budget_units, space.actions_);
  space.index_.reserve(space.actions_.size());
  for (std::size_t k = 0; k < space.actions_.size(); ++k) {
    space.index_.emplace(space.actions_[k].levels, k);
  }
  return space;
}

std::optional<std::size_t> ActionSpace::find(const CachingAction& action) const {
  auto it = index_.find(action.levels);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t ActionSpace::index(const CachingAction& action) const {
  auto found = find(action);
  if (!found) throw std::out_of_range("action is not in the action space");
  return *found;
}

const CachingAction& ActionSpace::sample(Rng& rng) const {
  std::uniform_int_distribution<std::size_t> pick(0, actions_.size() - 1);
  return actions_[pick(rng)];
}

CachingAction sample_uniform(const SystemParams& params, Granularity granularity, Rng& rng) {
  return CompositionSampler(params, granularity).sample(rng);
}

}  // namespace cocache
