#include "cocache/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "cocache/error.hpp"

namespace cocache {
namespace {

// Stream tags keep the per-purpose generators of one seed independent.
constexpr std::uint64_t kTransitionTableStream = 0x5452414e53ull;
constexpr std::uint64_t kChainStream = 1;
constexpr std::uint64_t kRequestStream = 2;
constexpr std::uint64_t kBurstStream = 3;

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

std::size_t draw_index(std::span<const double> probs, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double u = unit(rng);
  for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
    if (u < probs[k]) return k;
    u -= probs[k];
  }
  return probs.size() - 1;
}

RequestBatch multinomial(const std::vector<double>& theta, int total, Rng& rng) {
  RequestBatch batch;
  batch.counts.assign(theta.size(), 0);
  long long left = total;
  double mass = 1.0;
  for (std::size_t c = 0; c < theta.size() && left > 0; ++c) {
    if (c + 1 == theta.size()) {
      batch.counts[c] = left;
      break;
    }
    const double p = mass > 0.0 ? std::clamp(theta[c] / mass, 0.0, 1.0) : 1.0;
    std::binomial_distribution<long long> draw(left, p);
    const long long n = draw(rng);
    batch.counts[c] = n;
    left -= n;
    mass -= theta[c];
  }
  return batch;
}

}  // namespace

void EnvConfig::validate() const {
  params.validate();
  if (skewness.empty()) throw ConfigError("at least one popularity candidate is required");
  for (double alpha : skewness) {
    if (!(alpha > 0.0)) throw ConfigError("Zipf skewness must be positive");
  }
  if (request_mode == RequestMode::kShotNoise) {
    if (snm.bursts < 0) throw ConfigError("snm bursts must be >= 0");
    if (!(snm.mean_lifespan >= 1.0)) throw ConfigError("snm lifespan must be >= 1 slot");
    if (!(snm.boost > 0.0)) throw ConfigError("snm boost must be positive");
  }
  action_lattice(params, granularity);
}

PopularityProfile zipf_profile(int catalog_size, double alpha) {
  if (catalog_size < 1 || !(alpha > 0.0)) {
    throw std::invalid_argument("zipf_profile needs C >= 1 and alpha > 0");
  }
  PopularityProfile profile;
  profile.theta.resize(catalog_size);
  double norm = 0.0;
  for (int c = 0; c < catalog_size; ++c) {
    profile.theta[c] = std::pow(static_cast<double>(c + 1), -alpha);
    norm += profile.theta[c];
  }
  for (double& t : profile.theta) t /= norm;
  return profile;
}

TransitionModel::TransitionModel(std::size_t candidates, std::size_t columns,
                                 std::vector<double> probs)
    : candidates_(candidates), columns_(columns), probs_(std::move(probs)) {
  if (probs_.size() != candidates_ * columns_ * candidates_) {
    throw std::invalid_argument("transition tensor has the wrong size");
  }
}

std::span<const double> TransitionModel::row(std::size_t candidate, std::size_t column) const {
  return std::span<const double>(probs_).subspan((candidate * columns_ + column) * candidates_,
                                                 candidates_);
}

RequestBatch expected_counts(const PopularityProfile& theta, int total) {
  RequestBatch batch;
  batch.counts.resize(theta.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  remainders.reserve(theta.size());
  long long assigned = 0;
  for (std::size_t c = 0; c < theta.size(); ++c) {
    const double exact = theta.theta[c] * total;
    const double whole = std::floor(exact);
    batch.counts[c] = static_cast<std::int64_t>(whole);
    assigned += batch.counts[c];
    remainders.emplace_back(exact - whole, c);
  }
  // Largest remainder first, lower content index on ties.
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k) {
    ++batch.counts[remainders[k % remainders.size()].second];
    ++assigned;
  }
  return batch;
}

ExactModel::ExactModel(std::shared_ptr<const ActionSpace> space, TransitionModel transitions,
                       std::vector<PopularityProfile> candidates, SystemParams params)
    : space_(std::move(space)),
      transitions_(std::move(transitions)),
      candidates_(std::move(candidates)),
      params_(params) {
  const std::size_t n_actions = space_->size();
  const double total = params_.requests_per_slot;
  served_.resize(candidates_.size() * n_actions);
  for (std::size_t k = 0; k < candidates_.size(); ++k) {
    for (std::size_t a = 0; a < n_actions; ++a) {
      const double complement =
          total * miss_fraction(candidates_[k].theta, (*space_)[a], params_);
      served_[k * n_actions + a] = total - complement;
    }
  }
}

double ExactModel::expected_reward(std::size_t /*candidate*/, std::size_t prev_ordinal,
                                   std::size_t action, std::size_t next_candidate) const {
  const double served = served_[next_candidate * space_->size() + action];
  return served - update_traffic((*space_)[action], (*space_)[prev_ordinal], params_);
}

void ExactModel::successors(std::size_t state, std::size_t action,
                            std::vector<Transition>& out) const {
  const std::size_t n_actions = space_->size();
  const std::size_t candidate = state / n_actions;
  const std::size_t prev = state % n_actions;
  const auto row =
      transitions_.row(candidate, transitions_.per_action() ? action : std::size_t{0});
  const double cost = update_traffic((*space_)[action], (*space_)[prev], params_);
  out.clear();
  for (std::size_t next = 0; next < row.size(); ++next) {
    if (row[next] <= 0.0) continue;
    out.push_back({next * n_actions + action, row[next],
                   served_[next * n_actions + action] - cost});
  }
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  const SystemParams& params = config_.params;
  for (double alpha : config_.skewness) {
    candidates_.push_back(zipf_profile(params.catalog_size, alpha));
  }

  const double count = count_actions(params, config_.granularity);
  const bool enumerable = count <= static_cast<double>(config_.enumeration_cap);
  bool per_action = false;
  switch (config_.transitions) {
    case TransitionDependence::kAuto:
      per_action = enumerable;
      break;
    case TransitionDependence::kPerAction:
      if (!enumerable) {
        throw InfeasibleError("per-action transitions need an enumerable action space");
      }
      per_action = true;
      break;
    case TransitionDependence::kPerCandidate:
      break;
  }
  if (enumerable) {
    space_ = std::make_shared<const ActionSpace>(
        ActionSpace::enumerate(params, config_.granularity, config_.enumeration_cap));
  }

  // Each row is uniform on the probability simplex (normalized Exp(1) draws);
  // with two candidates this is P(stay) ~ U[0,1], P(switch) = 1 - P(stay).
  const std::size_t n = candidates_.size();
  const std::size_t columns = per_action ? space_->size() : 1;
  std::vector<double> probs(n * columns * n);
  Rng rng = make_stream(config_.transition_seed, kTransitionTableStream);
  std::exponential_distribution<double> exp1(1.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t col = 0; col < columns; ++col) {
      double* row = probs.data() + (k * columns + col) * n;
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = n == 1 ? 1.0 : exp1(rng);
        sum += row[j];
      }
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
    }
  }
  transitions_ = TransitionModel(n, columns, std::move(probs));
}

std::span<const double> Environment::transition_row(std::size_t candidate,
                                                    const CachingAction& action) const {
  if (!transitions_.per_action()) return transitions_.row(candidate, 0);
  return transitions_.row(candidate, space_->index(action));
}

EnvObservation Environment::reset(std::uint64_t seed) {
  transition_rng_ = make_stream(seed, kChainStream);
  request_rng_ = make_stream(seed, kRequestStream);
  burst_rng_ = make_stream(seed, kBurstStream);
  candidate_ = 0;
  prev_action_ = first_action(config_.params, config_.granularity);
  slot_ = 0;
  bursts_.clear();
  if (config_.request_mode == RequestMode::kShotNoise) refresh_bursts();
  initialized_ = true;
  return observe(sample_requests(candidate_), candidate_);
}

StepResult Environment::step(const CachingAction& action) {
  if (!initialized_) throw std::logic_error("step before reset");
  if (!validate(action, config_.params, config_.granularity)) {
    throw std::invalid_argument("invalid caching action");
  }
  const std::size_t next = draw_index(transition_row(candidate_, action), transition_rng_);
  if (config_.request_mode == RequestMode::kShotNoise) refresh_bursts();
  RequestBatch counts = sample_requests(next);
  const double reward = compute_reward(counts, action, prev_action_, config_.params);
  prev_action_ = action;
  candidate_ = next;
  ++slot_;
  return {observe(std::move(counts), next), reward};
}

ExactModel Environment::exact_model() const {
  if (!config_.white_box) throw std::logic_error("model hidden");
  if (config_.request_mode == RequestMode::kShotNoise) {
    throw std::logic_error("no exact model under shot-noise requests");
  }
  if (!space_) throw InfeasibleError("exact model needs an enumerable action space");
  return ExactModel(space_, transitions_, candidates_, config_.params);
}

RequestBatch Environment::sample_requests(std::size_t candidate) {
  const int total = config_.params.requests_per_slot;
  switch (config_.request_mode) {
    case RequestMode::kDeterministicExpected:
      return expected_counts(candidates_[candidate], total);
    case RequestMode::kShotNoise:
      return multinomial(shot_noise_profile(candidate).theta, total, request_rng_);
    case RequestMode::kZipfMultinomial:
      break;
  }
  return multinomial(candidates_[candidate].theta, total, request_rng_);
}

PopularityProfile Environment::shot_noise_profile(std::size_t candidate) {
  PopularityProfile profile = candidates_[candidate];
  for (const Burst& b : bursts_) profile.theta[b.content] *= config_.snm.boost;
  const double norm = std::accumulate(profile.theta.begin(), profile.theta.end(), 0.0);
  for (double& t : profile.theta) t /= norm;
  return profile;
}

long Environment::draw_lifespan() {
  // 1 + Geometric(1/mean) has mean exactly `mean`.
  std::geometric_distribution<long> extra(1.0 / config_.snm.mean_lifespan);
  return 1 + extra(burst_rng_);
}

void Environment::refresh_bursts() {
  const std::size_t catalog = static_cast<std::size_t>(config_.params.catalog_size);
  const std::size_t wanted =
      std::min(catalog, static_cast<std::size_t>(std::max(config_.snm.bursts, 0)));
  for (Burst& b : bursts_) --b.remaining;
  std::erase_if(bursts_, [](const Burst& b) { return b.remaining <= 0; });
  while (bursts_.size() < wanted) {
    std::vector<std::size_t> idle;
    for (std::size_t c = 0; c < catalog; ++c) {
      if (std::none_of(bursts_.begin(), bursts_.end(),
                       [c](const Burst& b) { return b.content == c; })) {
        idle.push_back(c);
      }
    }
    std::uniform_int_distribution<std::size_t> pick(0, idle.size() - 1);
    bursts_.push_back({idle[pick(burst_rng_)], draw_lifespan()});
  }
}

EnvObservation Environment::observe(RequestBatch counts, std::size_t candidate) const {
  EnvObservation obs;
  obs.theta = compute_popularity(counts);
  obs.counts = std::move(counts);
  obs.prev_action = prev_action_;
  if (config_.white_box) obs.candidate_index = candidate;
  return obs;
}

}  // namespace cocache
