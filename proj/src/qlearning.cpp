#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cocache/agents.hpp"
#include "cocache/error.hpp"

namespace cocache {

QTable::QTable(std::size_t states, std::size_t actions)
    : states_(states), actions_(actions), values_(states * actions, 0.0) {}

std::span<const double> QTable::row(std::size_t state) const {
  return std::span<const double>(values_).subspan(state * actions_, actions_);
}

std::size_t QTable::argmax(std::size_t state) const {
  const auto r = row(state);
  std::size_t best = 0;
  for (std::size_t a = 1; a < r.size(); ++a) {
    if (r[a] > r[best]) best = a;
  }
  return best;
}

double QTable::max(std::size_t state) const { return row(state)[argmax(state)]; }

void QTable::save(std::ostream& out) const {
  out << "qtable " << states_ << ' ' << actions_ << '\n';
  out << std::setprecision(17);
  for (std::size_t s = 0; s < states_; ++s) {
    for (std::size_t a = 0; a < actions_; ++a) {
      if (a) out << ' ';
      out << at(s, a);
    }
    out << '\n';
  }
}

QTable QTable::load(std::istream& in) {
  std::string tag;
  std::size_t states = 0;
  std::size_t actions = 0;
  if (!(in >> tag >> states >> actions) || tag != "qtable") {
    throw std::runtime_error("not a qtable snapshot");
  }
  QTable table(states, actions);
  for (double& v : table.values_) {
    if (!(in >> v)) throw std::runtime_error("truncated qtable snapshot");
  }
  return table;
}

QLearningAgent::QLearningAgent(std::shared_ptr<const ActionSpace> space,
                               std::size_t n_candidates, QLearningParams params)
    : space_(std::move(space)), params_(params) {
  if (!(params_.gamma >= 0.0 && params_.gamma <= 1.0)) {
    throw ConfigError("gamma must lie in [0, 1]");
  }
  if (!(params_.lambda > 0.0 && params_.lambda <= 1.0)) {
    throw ConfigError("lambda must lie in (0, 1]");
  }
  const std::size_t states = n_candidates * space_->size();
  const double entries = static_cast<double>(states) * static_cast<double>(space_->size());
  if (entries > static_cast<double>(params_.max_entries)) {
    throw InfeasibleError("Q-table of " + std::to_string(states) + " x " +
                          std::to_string(space_->size()) +
                          " entries is too large; use the vfa agent");
  }
  if (params_.lambda_decay < 0.0 || params_.lambda_decay > 1.0) {
    throw ConfigError("lambda_decay must lie in [0, 1]");
  }
  table_ = QTable(states, space_->size());
  if (params_.lambda_decay > 0.0) visits_.assign(states * space_->size(), 0);
}

std::size_t QLearningAgent::state_of(const EnvObservation& obs) const {
  if (!obs.candidate_index) {
    throw std::logic_error("Q-learning needs the white-box candidate index");
  }
  return *obs.candidate_index * space_->size() + space_->index(obs.prev_action);
}

std::size_t QLearningAgent::select_ordinal(std::size_t state, double epsilon, Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (epsilon > 0.0 && unit(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, space_->size() - 1);
    return pick(rng);
  }
  return table_.argmax(state);
}

CachingAction QLearningAgent::select(const EnvObservation& obs, double epsilon, Rng& rng) {
  return (*space_)[select_ordinal(state_of(obs), epsilon, rng)];
}

CachingAction QLearningAgent::greedy(const EnvObservation& obs) const {
  return (*space_)[table_.argmax(state_of(obs))];
}

void QLearningAgent::update_ordinals(std::size_t state, std::size_t action, double reward,
                                     std::size_t next_state) {
  double step = params_.lambda;
  if (!visits_.empty()) {
    const std::uint32_t n = ++visits_[state * table_.actions() + action];
    step /= std::pow(static_cast<double>(n), params_.lambda_decay);
  }
  double& q = table_.at(state, action);
  q += step * (reward + params_.gamma * table_.max(next_state) - q);
}

void QLearningAgent::update(const EnvObservation& obs, const CachingAction& action,
                            double reward, const EnvObservation& next_obs) {
  update_ordinals(state_of(obs), space_->index(action), reward, state_of(next_obs));
}

}  // namespace cocache
