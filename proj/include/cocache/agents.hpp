#pragma once

// Decision makers: the value-iteration oracle, tabular Q-learning, the linear
// value-function-approximation agent, and the myopic most-popular baseline.
// Non-cooperative (full-content) and uncoded variants are configurations of
// the learning agents, not separate classes.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cocache/actions.hpp"
#include "cocache/core.hpp"
#include "cocache/env.hpp"
#include "cocache/mdp.hpp"

namespace cocache {

// ---------------------------------------------------------------------------
// Value iteration

struct ValueIterationResult {
  std::vector<double> values;
  std::vector<std::size_t> policy;  // greedy action per state, lowest index on ties
  double residual = 0.0;            // sup-norm Bellman residual of `values`
  int sweeps = 0;
};

// Synchronous value iteration until the sup-norm change drops to `tolerance`.
// Throws std::invalid_argument unless 0 <= gamma < 1.
ValueIterationResult value_iteration(const FiniteMdp& mdp, double gamma, double tolerance,
                                     int max_sweeps = 1'000'000);

// Q(s, a) = sum_s' P (R + gamma V(s')) for every action of one state.
std::vector<double> action_values(const FiniteMdp& mdp, std::span<const double> values,
                                  double gamma, std::size_t state);

// ---------------------------------------------------------------------------
// Agent interface used by the harness

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  // Action for the current slot. epsilon is the exploration probability of
  // this slot; agents without exploration ignore it.
  virtual CachingAction select(const EnvObservation& obs, double epsilon, Rng& rng) = 0;
  // Exploitation-only choice, no randomness, no side effects.
  virtual CachingAction greedy(const EnvObservation& obs) const = 0;
  virtual void update(const EnvObservation& obs, const CachingAction& action, double reward,
                      const EnvObservation& next_obs) = 0;
};

// Plays pi* of the exact model.
class ValueIterationAgent final : public Agent {
 public:
  ValueIterationAgent(const ExactModel& model, double gamma, double tolerance);

  std::string name() const override { return "value_iteration"; }
  CachingAction select(const EnvObservation& obs, double epsilon, Rng& rng) override;
  CachingAction greedy(const EnvObservation& obs) const override;
  void update(const EnvObservation&, const CachingAction&, double,
              const EnvObservation&) override {}

  const ValueIterationResult& solution() const { return solution_; }
  std::size_t state_of(const EnvObservation& obs) const;

 private:
  std::shared_ptr<const ActionSpace> space_;
  ValueIterationResult solution_;
};

// ---------------------------------------------------------------------------
// Tabular Q-learning

class QTable {
 public:
  QTable() = default;
  QTable(std::size_t states, std::size_t actions);

  std::size_t states() const { return states_; }
  std::size_t actions() const { return actions_; }
  double& at(std::size_t state, std::size_t action) { return values_[state * actions_ + action]; }
  double at(std::size_t state, std::size_t action) const {
    return values_[state * actions_ + action];
  }
  std::span<const double> row(std::size_t state) const;
  // Lowest ordinal among the maximizers.
  std::size_t argmax(std::size_t state) const;
  double max(std::size_t state) const;

  // Text snapshot: "qtable <states> <actions>" then one row of values per
  // line, row-major, 17 significant digits.
  void save(std::ostream& out) const;
  static QTable load(std::istream& in);

  friend bool operator==(const QTable&, const QTable&) = default;

 private:
  std::size_t states_ = 0;
  std::size_t actions_ = 0;
  std::vector<double> values_;
};

struct QLearningParams {
  double gamma = 0.9;
  double lambda = 0.6;  // step size
  // Step size lambda / n^lambda_decay on the n-th update of an entry; 0 keeps
  // it constant.
  double lambda_decay = 0.0;
  // Upper bound on states * actions before the table is refused.
  std::size_t max_entries = std::size_t{1} << 26;
};

// State ordinal = candidate_index * |A| + ordinal(prev_action); needs the
// white-box candidate tag on every observation.
class QLearningAgent final : public Agent {
 public:
  QLearningAgent(std::shared_ptr<const ActionSpace> space, std::size_t n_candidates,
                 QLearningParams params);

  std::string name() const override { return "qlearning"; }
  CachingAction select(const EnvObservation& obs, double epsilon, Rng& rng) override;
  CachingAction greedy(const EnvObservation& obs) const override;
  void update(const EnvObservation& obs, const CachingAction& action, double reward,
              const EnvObservation& next_obs) override;

  // Q[x,a] += lambda (r + gamma max_a' Q[x',a'] - Q[x,a]).
  void update_ordinals(std::size_t state, std::size_t action, double reward,
                       std::size_t next_state);
  std::size_t state_of(const EnvObservation& obs) const;
  std::size_t select_ordinal(std::size_t state, double epsilon, Rng& rng) const;

  const QTable& table() const { return table_; }
  QTable& table() { return table_; }
  const ActionSpace& space() const { return *space_; }

 private:
  std::shared_ptr<const ActionSpace> space_;
  QLearningParams params_;
  QTable table_;
  std::vector<std::uint32_t> visits_;  // per entry, only with lambda_decay > 0
};

// ---------------------------------------------------------------------------
// Linear value function approximation
//
//   Qhat(x, a) = beta - w1 sum_i eta_i theta_i (1 - d a_i) u(1 - d a_i)
//                     - w2 sum_i xi_i (a_i - a_prev_i) u(a_i - a_prev_i)
//
// with u(v) = 1 for v >= 0 and 0 otherwise.

struct VfaParams {
  double beta = 0.0;
  std::vector<double> eta;
  std::vector<double> xi;
  double omega1 = 1.0;
  double omega2 = 0.01;
  double delta = 0.01;  // SGD step size
  double gamma = 0.9;

  static VfaParams zeros(std::size_t catalog_size);

  // "vfa <C>" header, then beta, omega1, omega2, delta, gamma on one line,
  // then the eta row and the xi row.
  void save(std::ostream& out) const;
  static VfaParams load(std::istream& in);
};

struct VfaGradient {
  double beta = 0.0;
  std::vector<double> eta;
  std::vector<double> xi;
};

double unit_step(double v);

double vfa_qhat(const VfaParams& params, const PopularityProfile& theta,
                const CachingAction& action, const CachingAction& prev_action, int serving_set,
                int levels);

// Coverage penalty sum_i c_i (1 - d a_i) u(1 - d a_i) for coefficients c.
double coverage_penalty(std::span<const double> coefficients, const CachingAction& action,
                        const SystemParams& sys);

// Number of contents per level for a budget of K*L levels, index 1..l_max
// (entry 0 unused). The top level takes as many contents as it can; the rest
// of the budget flows to lower levels.
std::vector<int> level_block_sizes(const SystemParams& sys, int catalog_size);

// Contents sorted by descending coefficient (stable: lower index first).
std::vector<std::size_t> rank_by_coefficient(std::span<const double> coefficients);

// Block assignment of levels l_max, l_max-1, ..., 1 down the ranking.
CachingAction coarse_assignment(std::span<const double> coefficients, const SystemParams& sys);

// One pass of single-level moves from top-block contents to lower-ranked
// contents whenever the move lowers the coverage penalty. Only runs when
// d * l_max / L > 1 (top-level contents are over-covered).
CachingAction fine_tune(std::span<const double> coefficients, CachingAction coarse,
                        const SystemParams& sys);

// argmax of Qhat with the update-cost term dropped: coarse assignment on
// eta_i * theta_i followed by fine tuning.
CachingAction vfa_select(const VfaParams& params, const PopularityProfile& theta,
                         const CachingAction& prev_action, const SystemParams& sys);

// Gradient of (target - Qhat(x, a))^2 with the target held fixed.
VfaGradient vfa_loss_gradient(const VfaParams& params, const PopularityProfile& theta,
                              const CachingAction& action, const CachingAction& prev_action,
                              double target, const SystemParams& sys);

// One SGD step on the TD target r + gamma * Qhat(x', vfa_select(x')).
// Returns the TD error e = target - Qhat(x, a) before the step.
double vfa_update(VfaParams& params, const EnvObservation& obs, const CachingAction& action,
                  double reward, const EnvObservation& next_obs, const SystemParams& sys);

class VfaAgent final : public Agent {
 public:
  VfaAgent(SystemParams sys, Granularity granularity, VfaParams params);

  std::string name() const override { return "vfa"; }
  CachingAction select(const EnvObservation& obs, double epsilon, Rng& rng) override;
  CachingAction greedy(const EnvObservation& obs) const override;
  void update(const EnvObservation& obs, const CachingAction& action, double reward,
              const EnvObservation& next_obs) override;

  const VfaParams& params() const { return params_; }
  VfaParams& params() { return params_; }

 private:
  SystemParams sys_;
  CompositionSampler sampler_;
  VfaParams params_;
};

// ---------------------------------------------------------------------------
// Most-popular cooperative caching: coarse assignment on the current theta.

CachingAction mpcc_select(const PopularityProfile& theta, const SystemParams& sys);

class MpccAgent final : public Agent {
 public:
  explicit MpccAgent(SystemParams sys) : sys_(sys) {}

  std::string name() const override { return "mpcc"; }
  CachingAction select(const EnvObservation& obs, double, Rng&) override { return greedy(obs); }
  CachingAction greedy(const EnvObservation& obs) const override {
    return mpcc_select(obs.theta, sys_);
  }
  void update(const EnvObservation&, const CachingAction&, double,
              const EnvObservation&) override {}

 private:
  SystemParams sys_;
};

}  // namespace cocache
