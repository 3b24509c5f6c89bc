#pragma once

#include <cstddef>
#include <vector>

namespace cocache {

struct Transition {
  std::size_t next_state;
  double probability;
  double reward;  // expected reward of this (s, a, s') triple
};

// A finite MDP exposed through its successor lists. Implementations may build
// the lists on demand; `out` is cleared and refilled on every call.
class FiniteMdp {
 public:
  virtual ~FiniteMdp() = default;
  virtual std::size_t num_states() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual void successors(std::size_t state, std::size_t action,
                          std::vector<Transition>& out) const = 0;
};

// Explicit table, mainly for hand-built models.
class TabularMdp final : public FiniteMdp {
 public:
  TabularMdp(std::size_t states, std::size_t actions);

  void add(std::size_t state, std::size_t action, std::size_t next_state, double probability,
           double reward);

  std::size_t num_states() const override { return states_; }
  std::size_t num_actions() const override { return actions_; }
  void successors(std::size_t state, std::size_t action,
                  std::vector<Transition>& out) const override;

 private:
  std::size_t states_;
  std::size_t actions_;
  std::vector<std::vector<Transition>> table_;  // [state * actions + action]
};

}  // namespace cocache
