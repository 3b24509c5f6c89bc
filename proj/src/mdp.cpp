#include "cocache/mdp.hpp"

#include <stdexcept>

namespace cocache {

TabularMdp::TabularMdp(std::size_t states, std::size_t actions)
    : states_(states), actions_(actions), table_(states * actions) {}

void TabularMdp::add(std::size_t state, std::size_t action, std::size_t next_state,
                     double probability, double reward) {
  if (state >= states_ || next_state >= states_ || action >= actions_) {
    throw std::out_of_range("TabularMdp::add index out of range");
  }
  table_[state * actions_ + action].push_back({next_state, probability, reward});
}

void TabularMdp::successors(std::size_t state, std::size_t action,
                            std::vector<Transition>& out) const {
  out = table_.at(state * actions_ + action);
}

}  // namespace cocache
