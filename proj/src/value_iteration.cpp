#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cocache/agents.hpp"

namespace cocache {
namespace {

// One Bellman backup of every state; writes the greedy policy when asked.
double backup(const FiniteMdp& mdp, std::span<const double> values, double gamma,
              std::vector<double>& next, std::vector<std::size_t>* policy) {
  std::vector<Transition> succ;
  double change = 0.0;
  for (std::size_t s = 0; s < mdp.num_states(); ++s) {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_action = 0;
    for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
      mdp.successors(s, a, succ);
      double q = 0.0;
      for (const Transition& t : succ) q += t.probability * (t.reward + gamma * values[t.next_state]);
      if (q > best) {
        best = q;
        best_action = a;
      }
    }
    next[s] = best;
    if (policy) (*policy)[s] = best_action;
    change = std::max(change, std::abs(best - values[s]));
  }
  return change;
}

}  // namespace

ValueIterationResult value_iteration(const FiniteMdp& mdp, double gamma, double tolerance,
                                     int max_sweeps) {
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("value iteration needs 0 <= gamma < 1");
  }
  ValueIterationResult result;
  result.values.assign(mdp.num_states(), 0.0);
  result.policy.assign(mdp.num_states(), 0);
  std::vector<double> next(mdp.num_states(), 0.0);
  while (result.sweeps < max_sweeps) {
    const double change = backup(mdp, result.values, gamma, next, nullptr);
    result.values.swap(next);
    ++result.sweeps;
    if (change <= tolerance) break;
  }
  result.residual = backup(mdp, result.values, gamma, next, &result.policy);
  return result;
}

std::vector<double> action_values(const FiniteMdp& mdp, std::span<const double> values,
                                  double gamma, std::size_t state) {
  std::vector<double> q(mdp.num_actions(), 0.0);
  std::vector<Transition> succ;
  for (std::size_t a = 0; a < mdp.num_actions(); ++a) {
    mdp.successors(state, a, succ);
    for (const Transition& t : succ) q[a] += t.probability * (t.reward + gamma * values[t.next_state]);
  }
  return q;
}

ValueIterationAgent::ValueIterationAgent(const ExactModel& model, double gamma,
                                         double tolerance)
    : space_(model.shared_space()),
      solution_(value_iteration(model, gamma, tolerance)) {}

std::size_t ValueIterationAgent::state_of(const EnvObservation& obs) const {
  if (!obs.candidate_index) {
    throw std::logic_error("value-iteration agent needs white-box observations");
  }
  return *obs.candidate_index * space_->size() + space_->index(obs.prev_action);
}

CachingAction ValueIterationAgent::select(const EnvObservation& obs, double, Rng&) {
  return greedy(obs);
}

CachingAction ValueIterationAgent::greedy(const EnvObservation& obs) const {
  return (*space_)[solution_.policy[state_of(obs)]];
}

}  // namespace cocache
