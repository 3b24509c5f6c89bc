#pragma once

// Experiment configuration and its INI-style file format.
//
//   [env]       sbs_count catalog_size cache_capacity serving_set levels
//               content_size requests_per_slot skewness transition_seed
//               request_mode transitions white_box enumeration_cap
//               snm_bursts snm_lifespan snm_boost
//   [agent]     kind cooperative epsilon gamma lambda lambda_decay omega1
//               omega2 delta tolerance
//   [schedule]  horizon switch_slot seeds metrics_window
//   [output]    path every
//   [sweep]     cache_sizes variants deltas nc_deltas
//
// Lists are comma separated. Unknown sections or keys are rejected.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cocache/agents.hpp"
#include "cocache/env.hpp"

namespace cocache {

enum class AgentKind { kValueIteration, kQLearning, kVfa, kMpcc };
enum class Discipline { kMds, kUncoded };

struct AgentConfig {
  AgentKind kind = AgentKind::kQLearning;
  // false: non-cooperative full-content caching, every user served by one SBS.
  bool cooperative = true;
  double epsilon = 0.1;  // exploration probability before the switch slot
  double gamma = 0.9;
  double lambda = 0.6;   // Q-learning step size
  double lambda_decay = 0.0;  // Q-learning step lambda / n^decay per entry
  double omega1 = 1.0;
  double omega2 = 0.01;
  double delta = 0.01;   // VFA step size
  double tolerance = 1e-10;  // value-iteration stopping threshold
};

struct ExperimentConfig {
  EnvConfig env;
  AgentConfig agent;
  Discipline discipline = Discipline::kMds;
  // Unset: 10^5 slots when K = 1, 3*10^5 otherwise.
  std::optional<long> switch_slot;
  // Unset: switch slot + 10^5.
  std::optional<long> horizon;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  long metrics_window = 0;  // trailing window for the rho column; 0 = current phase
  std::string output_path = "out";
  long row_stride = 1;      // emit every n-th slot (the last slot always)
  std::vector<int> sweep_cache_sizes{1, 2, 3, 4};
  std::vector<std::string> sweep_variants{"qlearning", "qlearning+uncoded", "mpcc",
                                          "qlearning+nc"};
  // Optional VFA step per entry of sweep_cache_sizes; nc_deltas covers +nc
  // variants and falls back to deltas, which falls back to agent.delta.
  std::vector<double> sweep_deltas;
  std::vector<double> sweep_nc_deltas;

  long resolved_switch_slot() const;
  long resolved_horizon() const;

  // Throws ConfigError (bad values) or InfeasibleError (empty action space).
  void validate() const;
};

std::string to_string(AgentKind kind);
std::string to_string(Discipline discipline);
AgentKind parse_agent_kind(const std::string& text);
Discipline parse_discipline(const std::string& text);

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(std::istream& in);

// The resolved configuration in the same format; parse_config reads it back.
void write_config(const ExperimentConfig& config, std::ostream& out);

// Applies a variant label "<agent>[+uncoded][+nc]": the agent kind, the
// uncoded discipline, and non-cooperative caching (d = 1, full contents).
ExperimentConfig apply_variant(ExperimentConfig config, const std::string& variant);

// Label of a configuration in the same syntax.
std::string variant_label(const ExperimentConfig& config);

// Environment config with the non-cooperative overrides applied.
EnvConfig effective_env(const ExperimentConfig& config);

}  // namespace cocache
