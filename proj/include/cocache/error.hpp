#pragma once

#include <stdexcept>
#include <string>

namespace cocache {

// Malformed or inconsistent configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A well-formed scenario that admits no valid caching action, or one whose
// action space is too large for the requested (tabular) treatment. Exit code 3.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cocache
