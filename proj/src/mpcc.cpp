#include "cocache/agents.hpp"

namespace cocache {

CachingAction mpcc_select(const PopularityProfile& theta, const SystemParams& sys) {
  return coarse_assignment(theta.theta, sys);
}

}  // namespace cocache
