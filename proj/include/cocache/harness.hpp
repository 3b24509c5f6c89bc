#pragma once

// Seeded experiment runs, metric traces, K sweeps and policy comparison.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cocache/agents.hpp"
#include "cocache/config.hpp"
#include "cocache/serving.hpp"

namespace cocache {

struct MetricRow {
  long slot = 0;
  double rho = 0.0;
  double cumulative_reward = 0.0;
  std::optional<double> cosine_similarity;
  double epsilon = 0.0;
};

// One visited state: the white-box candidate tag and the cached action going
// into the slot.
struct VisitedState {
  std::size_t candidate = 0;
  CachingAction prev_action;
};

struct RunResult {
  std::string variant;
  std::uint64_t seed = 0;
  long switch_slot = 0;
  long horizon = 0;
  std::vector<MetricRow> rows;        // every row_stride-th slot and the last
  std::vector<SlotTraffic> traffic;   // every slot
  std::vector<double> rewards;        // every slot
  // Filled when the environment is white-box: the state each slot started
  // in and the agent's greedy action there at that time.
  std::vector<VisitedState> visited;
  std::vector<CachingAction> greedy_actions;
  double converged_rho = 0.0;
  std::unique_ptr<Agent> agent;       // the trained agent
};

// Cosine of the fraction vectors. Throws std::invalid_argument on a zero
// vector or a size mismatch.
double cosine_similarity(const CachingAction& a, const CachingAction& a_opt);

// rho over the final 20% of the exploitation window.
double converged_rho(std::span<const SlotTraffic> traffic, long switch_slot);

// Builds the agent a configuration names. Tabular agents throw
// InfeasibleError when the action space cannot be enumerated.
std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, const Environment& env);

// One seed. With an oracle, the cosine column compares the agent's greedy
// action against the oracle's at every visited state. record_states keeps
// the visited states and greedy actions of a white-box run.
RunResult run_single(const ExperimentConfig& config, std::uint64_t seed,
                     const Agent* oracle = nullptr, bool record_states = true);

// Every seed, in parallel; results in seed order.
std::vector<RunResult> run(const ExperimentConfig& config, const Agent* oracle = nullptr);

// Per-slot cosine between the recorded greedy actions and the oracle's
// choice at the same states. Throws std::invalid_argument when the run has
// no white-box record.
std::vector<double> compare_policies(const RunResult& result, const Agent& oracle);

struct SweepRow {
  std::string variant;
  int cache_capacity = 0;
  std::uint64_t seed = 0;
  std::optional<double> converged_rho;  // empty when the scenario was skipped
  std::string status;                   // "ok" or the reason for skipping
};

struct SweepSummary {
  std::string variant;
  int cache_capacity = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single seed
  std::size_t seeds = 0;
};

// Runs every (variant, K, seed) of base.sweep_* in parallel. Rows come back
// ordered by variant, K, seed.
std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::vector<int>& cache_sizes,
                            const std::vector<std::string>& variants);
std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows);

// CSV output. Numbers use the shortest round-trip form; an empty cosine cell means
// no oracle.
inline constexpr const char* kMetricHeader = "slot,rho,cumulative_reward,cosine_similarity,epsilon";
void write_metrics_csv(const RunResult& result, std::ostream& out);
void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out);
void write_summary_csv(const std::vector<SweepSummary>& rows, std::ostream& out);

// Writes <dir>/<variant>_seed<k>.csv per result plus <dir>/manifest.txt with
// the resolved configuration. Returns the CSV paths.
std::vector<std::filesystem::path> write_run_outputs(const ExperimentConfig& config,
                                                     const std::vector<RunResult>& results,
                                                     const std::filesystem::path& dir);

}  // namespace cocache
