#include "cocache/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "cocache/error.hpp"

namespace cocache {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Runs job(i) for i in [0, n) on up to hardware_concurrency threads and
// rethrows the first failure.
template <typename Job>
void parallel_for(std::size_t n, Job job) {
  const std::size_t workers =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

double cosine_similarity(const CachingAction& a, const CachingAction& a_opt) {
  if (a.size() != a_opt.size()) throw std::invalid_argument("cosine: size mismatch");
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a.levels[i];
    const double y = a_opt.levels[i];
    dot += x * y;
    na += x * x;
    nb += y * y;
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero vector");
  return dot / std::sqrt(na * nb);
}

double converged_rho(std::span<const SlotTraffic> traffic, long switch_slot) {
  const long n = static_cast<long>(traffic.size());
  if (switch_slot < 0 || switch_slot >= n) {
    throw std::invalid_argument("converged_rho: empty exploitation window");
  }
  const long tail = std::max(1L, (n - switch_slot + 4) / 5);
  return direct_ratio(traffic.subspan(n - tail));
}

std::unique_ptr<Agent> make_agent(const ExperimentConfig& config, const Environment& env) {
  const EnvConfig& ec = env.config();
  switch (config.agent.kind) {
    case AgentKind::kValueIteration:
      return std::make_unique<ValueIterationAgent>(env.exact_model(), config.agent.gamma,
                                                   config.agent.tolerance);
    case AgentKind::kQLearning: {
      if (!env.action_space()) {
        throw InfeasibleError("action space too large to enumerate; use the vfa agent");
      }
      QLearningParams p;
      p.gamma = config.agent.gamma;
      p.lambda = config.agent.lambda;
      p.lambda_decay = config.agent.lambda_decay;
      return std::make_unique<QLearningAgent>(env.action_space(), env.candidates().size(), p);
    }
    case AgentKind::kVfa: {
      VfaParams p = VfaParams::zeros(static_cast<std::size_t>(ec.params.catalog_size));
      p.omega1 = config.agent.omega1;
      p.omega2 = config.agent.omega2;
      p.delta = config.agent.delta;
      p.gamma = config.agent.gamma;
      return std::make_unique<VfaAgent>(ec.params, ec.granularity, std::move(p));
    }
    case AgentKind::kMpcc:
      return std::make_unique<MpccAgent>(ec.params);
  }
  throw ConfigError("unknown agent kind");
}

RunResult run_single(const ExperimentConfig& config, std::uint64_t seed, const Agent* oracle,
                     bool record_states) {
  config.validate();
  Environment env(effective_env(config));
  const SystemParams& sys = env.config().params;

  RunResult result;
  result.variant = variant_label(config);
  result.seed = seed;
  result.switch_slot = config.resolved_switch_slot();
  result.horizon = config.resolved_horizon();
  result.agent = make_agent(config, env);
  Agent& agent = *result.agent;

  std::seed_seq agent_seq{seed, std::uint64_t{101}};
  std::seed_seq serve_seq{seed, std::uint64_t{102}};
  Rng agent_rng(agent_seq);
  Rng serve_rng(serve_seq);
  std::optional<UncodedFragmentStore> store;
  if (config.discipline == Discipline::kUncoded) store.emplace(sys);

  const long horizon = result.horizon;
  const bool white_box = env.config().white_box;
  if (oracle && !white_box) throw std::invalid_argument("oracle comparison needs white-box");
  result.traffic.reserve(horizon);
  result.rewards.reserve(horizon);
  if (white_box && record_states) {
    result.visited.reserve(horizon);
    result.greedy_actions.reserve(horizon);
  }

  // Prefix sums for the windowed rho column.
  std::vector<double> direct_sum(horizon + 1, 0.0);
  std::vector<double> total_sum(horizon + 1, 0.0);
  double cumulative = 0.0;

  EnvObservation obs = env.reset(seed);
  for (long t = 0; t < horizon; ++t) {
    const double epsilon = t < result.switch_slot ? config.agent.epsilon : 0.0;
    const bool emit = t % config.row_stride == 0 || t + 1 == horizon;

    std::optional<double> cosine;
    if (white_box && (record_states || (oracle && emit))) {
      CachingAction greedy = agent.greedy(obs);
      if (oracle && emit) cosine = cosine_similarity(greedy, oracle->greedy(obs));
      if (record_states) {
        result.visited.push_back({*obs.candidate_index, obs.prev_action});
        result.greedy_actions.push_back(std::move(greedy));
      }
    }

    const CachingAction action = agent.select(obs, epsilon, agent_rng);
    StepResult step = env.step(action);
    SlotTraffic traffic;
    double reward = 0.0;
    if (store) {
      traffic = store->account(step.observation.counts, action, obs.prev_action, serve_rng);
      reward = traffic.sbs_direct - traffic.update_cost;
    } else {
      traffic = account_mds(step.observation.counts, action, obs.prev_action, sys);
      reward = step.reward;
    }
    agent.update(obs, action, reward, step.observation);

    result.traffic.push_back(traffic);
    result.rewards.push_back(reward);
    cumulative += reward;
    direct_sum[t + 1] = direct_sum[t] + traffic.sbs_direct;
    total_sum[t + 1] = total_sum[t] + traffic.total;

    if (emit) {
      long start = t < result.switch_slot ? 0 : result.switch_slot;
      if (config.metrics_window > 0) start = std::max(0L, t + 1 - config.metrics_window);
      const double total = total_sum[t + 1] - total_sum[start];
      MetricRow row;
      row.slot = t;
      row.rho = total > 0.0 ? (direct_sum[t + 1] - direct_sum[start]) / total : 0.0;
      row.cumulative_reward = cumulative;
      row.cosine_similarity = cosine;
      row.epsilon = epsilon;
      result.rows.push_back(row);
    }
    obs = std::move(step.observation);
  }
  result.converged_rho = converged_rho(result.traffic, result.switch_slot);
  return result;
}

std::vector<RunResult> run(const ExperimentConfig& config, const Agent* oracle) {
  config.validate();
  std::vector<RunResult> results(config.seeds.size());
  parallel_for(config.seeds.size(),
               [&](std::size_t i) { results[i] = run_single(config, config.seeds[i], oracle); });
  return results;
}

std::vector<double> compare_policies(const RunResult& result, const Agent& oracle) {
  if (result.visited.empty() || result.visited.size() != result.greedy_actions.size()) {
    throw std::invalid_argument("compare_policies needs a white-box run record");
  }
  std::vector<double> trace;
  trace.reserve(result.visited.size());
  EnvObservation obs;
  for (std::size_t t = 0; t < result.visited.size(); ++t) {
    obs.candidate_index = result.visited[t].candidate;
    obs.prev_action = result.visited[t].prev_action;
    trace.push_back(cosine_similarity(result.greedy_actions[t], oracle.greedy(obs)));
  }
  return trace;
}

std::vector<SweepRow> sweep(const ExperimentConfig& base, const std::vector<int>& cache_sizes,
                            const std::vector<std::string>& variants) {
  const bool per_k_delta = !base.sweep_deltas.empty() || !base.sweep_nc_deltas.empty();
  if (per_k_delta && cache_sizes != base.sweep_cache_sizes) {
    throw ConfigError("sweep deltas are tied to sweep.cache_sizes; override both or neither");
  }
  std::vector<SweepRow> rows;
  for (const std::string& v : variants) {
    for (int k : cache_sizes) {
      for (std::uint64_t seed : base.seeds) rows.push_back({v, k, seed, std::nullopt, ""});
    }
  }
  parallel_for(rows.size(), [&](std::size_t i) {
    SweepRow& row = rows[i];
    ExperimentConfig cfg = apply_variant(base, row.variant);
    cfg.env.params.cache_capacity = row.cache_capacity;
    cfg.seeds = {row.seed};
    if (per_k_delta) {
      const auto& deltas = !cfg.agent.cooperative && !base.sweep_nc_deltas.empty()
                               ? base.sweep_nc_deltas
                               : base.sweep_deltas;
      const auto at = std::find(cache_sizes.begin(), cache_sizes.end(), row.cache_capacity);
      if (!deltas.empty()) cfg.agent.delta = deltas[at - cache_sizes.begin()];
    }
    try {
      row.converged_rho = run_single(cfg, row.seed, nullptr, false).converged_rho;
      row.status = "ok";
    } catch (const InfeasibleError& e) {
      row.status = std::string("skipped: ") + e.what();
    }
  });
  return rows;
}

std::vector<SweepSummary> summarize(const std::vector<SweepRow>& rows) {
  std::vector<SweepSummary> out;
  std::map<std::pair<std::string, int>, std::vector<double>> groups;
  std::vector<std::pair<std::string, int>> order;
  for (const SweepRow& row : rows) {
    const auto key = std::make_pair(row.variant, row.cache_capacity);
    if (!groups.contains(key)) order.push_back(key);
    auto& values = groups[key];
    if (row.converged_rho) values.push_back(*row.converged_rho);
  }
  for (const auto& key : order) {
    const auto& values = groups[key];
    SweepSummary s{key.first, key.second, 0.0, 0.0, values.size()};
    if (!values.empty()) {
      for (double v : values) s.mean += v;
      s.mean /= static_cast<double>(values.size());
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
    }
    out.push_back(s);
  }
  return out;
}

void write_metrics_csv(const RunResult& result, std::ostream& out) {
  out << kMetricHeader << '\n';
  for (const MetricRow& row : result.rows) {
    out << row.slot << ',' << fmt(row.rho) << ',' << fmt(row.cumulative_reward) << ','
        << (row.cosine_similarity ? fmt(*row.cosine_similarity) : "") << ',' << fmt(row.epsilon)
        << '\n';
  }
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
  out << "variant,cache_capacity,seed,converged_rho,status\n";
  for (const SweepRow& row : rows) {
    out << row.variant << ',' << row.cache_capacity << ',' << row.seed << ','
        << (row.converged_rho ? fmt(*row.converged_rho) : "") << ',' << row.status << '\n';
  }
}

void write_summary_csv(const std::vector<SweepSummary>& rows, std::ostream& out) {
  out << "variant,cache_capacity,mean_rho,stddev_rho,seeds\n";
  for (const SweepSummary& s : rows) {
    out << s.variant << ',' << s.cache_capacity << ',' << fmt(s.mean) << ',' << fmt(s.stddev)
        << ',' << s.seeds << '\n';
  }
}

std::vector<std::filesystem::path> write_run_outputs(const ExperimentConfig& config,
                                                     const std::vector<RunResult>& results,
                                                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> paths;
  std::ofstream manifest(dir / "manifest.txt");
  manifest << "# resolved configuration\n";
  write_config(config, manifest);
  manifest << "\n# results: variant seed converged_rho csv\n";
  for (const RunResult& r : results) {
    const std::string stem = r.variant + "_seed" + std::to_string(r.seed);
    const auto csv = dir / (stem + ".csv");
    std::ofstream out(csv);
    write_metrics_csv(r, out);
    if (!out) throw std::runtime_error("cannot write " + csv.string());
    paths.push_back(csv);
    manifest << "# " << r.variant << ' ' << r.seed << ' ' << fmt(r.converged_rho) << ' '
             << csv.filename().string() << '\n';

    if (const auto* q = dynamic_cast<const QLearningAgent*>(r.agent.get())) {
      std::ofstream snap(dir / (stem + ".qtable"));
      q->table().save(snap);
    } else if (const auto* v = dynamic_cast<const VfaAgent*>(r.agent.get())) {
      std::ofstream snap(dir / (stem + ".vfa"));
      v->params().save(snap);
    }
  }
  if (!manifest) throw std::runtime_error("cannot write manifest");
  return paths;
}

}  // namespace cocache
