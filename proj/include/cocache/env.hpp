#pragma once

// MDP environment simulator. The popularity state moves among a finite set of
// Zipf-like candidate profiles; each slot the chosen caching action is applied
// off-peak, the next candidate is drawn, peak-hour requests are sampled from
// it, and the slot reward is emitted.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cocache/actions.hpp"
#include "cocache/core.hpp"
#include "cocache/mdp.hpp"

namespace cocache {

enum class RequestMode { kZipfMultinomial, kDeterministicExpected, kShotNoise };

// kAuto: one random row per (candidate, action) when the action space can be
// enumerated, otherwise one row per candidate.
enum class TransitionDependence { kAuto, kPerAction, kPerCandidate };

struct ShotNoiseParams {
  int bursts = 3;              // contents temporarily popular at any time
  double mean_lifespan = 20.0;  // slots, geometric
  double boost = 5.0;           // popularity multiplier while bursting
};

struct EnvConfig {
  SystemParams params;
  std::vector<double> skewness{1.36, 2.3};  // one Zipf exponent per candidate
  std::uint64_t transition_seed = 1;
  RequestMode request_mode = RequestMode::kZipfMultinomial;
  ShotNoiseParams snm;
  bool white_box = true;
  Granularity granularity = Granularity::kFractional;
  TransitionDependence transitions = TransitionDependence::kAuto;
  std::size_t enumeration_cap = kDefaultEnumerationCap;

  std::size_t n_candidates() const { return skewness.size(); }
  void validate() const;
};

// theta_c proportional to c^-alpha, c = 1..C.
PopularityProfile zipf_profile(int catalog_size, double alpha);

// Row-stochastic tensor over next candidates, indexed [candidate][column],
// where the column is an action ordinal (per-action) or always 0.
class TransitionModel {
 public:
  TransitionModel() = default;
  TransitionModel(std::size_t candidates, std::size_t columns, std::vector<double> probs);

  std::size_t candidates() const { return candidates_; }
  std::size_t columns() const { return columns_; }
  bool per_action() const { return columns_ > 1; }
  std::span<const double> row(std::size_t candidate, std::size_t column) const;
  const std::vector<double>& data() const { return probs_; }

  friend bool operator==(const TransitionModel&, const TransitionModel&) = default;

 private:
  std::size_t candidates_ = 0;
  std::size_t columns_ = 0;
  std::vector<double> probs_;
};

// Largest-remainder rounding of M * theta; the result always sums to M.
RequestBatch expected_counts(const PopularityProfile& theta, int total);

// The MDP as the white-box oracle sees it. State ordinal is
// candidate * |A| + ordinal(prev action); the successor of (x, a) is
// (candidate', a). Expected rewards substitute E[N_i] = M * theta'_i.
class ExactModel final : public FiniteMdp {
 public:
  ExactModel(std::shared_ptr<const ActionSpace> space, TransitionModel transitions,
             std::vector<PopularityProfile> candidates, SystemParams params);

  std::size_t num_states() const override { return candidates_.size() * space_->size(); }
  std::size_t num_actions() const override { return space_->size(); }
  void successors(std::size_t state, std::size_t action,
                  std::vector<Transition>& out) const override;

  std::size_t state_index(std::size_t candidate, std::size_t prev_ordinal) const {
    return candidate * space_->size() + prev_ordinal;
  }
  double expected_reward(std::size_t candidate, std::size_t prev_ordinal, std::size_t action,
                         std::size_t next_candidate) const;

  const ActionSpace& space() const { return *space_; }
  std::shared_ptr<const ActionSpace> shared_space() const { return space_; }
  const TransitionModel& transitions() const { return transitions_; }
  std::size_t n_candidates() const { return candidates_.size(); }

 private:
  std::shared_ptr<const ActionSpace> space_;
  TransitionModel transitions_;
  std::vector<PopularityProfile> candidates_;
  SystemParams params_;
  std::vector<double> served_;  // [next_candidate * |A| + action]: M - M * miss
};

struct StepResult {
  EnvObservation observation;
  double reward = 0.0;
};

class Environment {
 public:
  // Builds the candidate profiles and the transition model from
  // transition_seed. Throws ConfigError / InfeasibleError on bad configs.
  explicit Environment(EnvConfig config);

  EnvObservation reset(std::uint64_t seed);
  StepResult step(const CachingAction& action);

  // White-box only; throws std::logic_error("model hidden") otherwise.
  ExactModel exact_model() const;

  const EnvConfig& config() const { return config_; }
  const std::vector<PopularityProfile>& candidates() const { return candidates_; }
  const TransitionModel& transitions() const { return transitions_; }
  // Null when transitions are per-candidate and the space was not enumerated.
  std::shared_ptr<const ActionSpace> action_space() const { return space_; }
  std::size_t current_candidate() const { return candidate_; }
  long slot() const { return slot_; }
  std::span<const double> transition_row(std::size_t candidate,
                                         const CachingAction& action) const;

 private:
  struct Burst {
    std::size_t content;
    long remaining;
  };

  RequestBatch sample_requests(std::size_t candidate);
  PopularityProfile shot_noise_profile(std::size_t candidate);
  void refresh_bursts();
  long draw_lifespan();
  EnvObservation observe(RequestBatch counts, std::size_t candidate) const;

  EnvConfig config_;
  std::vector<PopularityProfile> candidates_;
  std::shared_ptr<const ActionSpace> space_;
  TransitionModel transitions_;

  bool initialized_ = false;
  std::size_t candidate_ = 0;
  CachingAction prev_action_;
  long slot_ = 0;
  Rng transition_rng_;
  Rng request_rng_;
  Rng burst_rng_;
  std::vector<Burst> bursts_;
};

}  // namespace cocache
