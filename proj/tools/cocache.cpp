// Command-line front end: run, sweep, compare, validate-config.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible scenario,
// 1 anything else.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cocache/config.hpp"
#include "cocache/error.hpp"
#include "cocache/harness.hpp"

namespace {

using namespace cocache;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string agent;
  std::string discipline;
  bool quiet = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "INI configuration file")->required();
  cmd->add_option("--seed", o.seed, "run this seed only");
  cmd->add_option("--out", o.out, "output directory (overrides output.path)");
  cmd->add_option("--agent", o.agent, "value_iteration | qlearning | vfa | mpcc");
  cmd->add_option("--discipline", o.discipline, "mds | uncoded");
  cmd->add_flag("--quiet", o.quiet, "no progress output");
}

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig c = load_config(o.config_path);
  if (o.seed) c.seeds = {*o.seed};
  if (!o.out.empty()) c.output_path = o.out;
  if (!o.agent.empty()) c.agent.kind = parse_agent_kind(o.agent);
  if (!o.discipline.empty()) c.discipline = parse_discipline(o.discipline);
  c.validate();
  return c;
}

int cmd_run(const CommonOptions& o) {
  const ExperimentConfig c = resolve(o);
  const auto results = run(c);
  const auto paths = write_run_outputs(c, results, c.output_path);
  if (!o.quiet) {
    for (std::size_t i = 0; i < results.size(); ++i) {
      std::cout << results[i].variant << " seed " << results[i].seed
                << " converged rho " << results[i].converged_rho << "  -> "
                << paths[i].string() << '\n';
    }
  }
  return 0;
}

int cmd_compare(const CommonOptions& o) {
  const ExperimentConfig c = resolve(o);
  ExperimentConfig oracle_cfg = c;
  oracle_cfg.agent.kind = AgentKind::kValueIteration;
  oracle_cfg.validate();
  Environment env(effective_env(oracle_cfg));
  const auto oracle = make_agent(oracle_cfg, env);

  const auto results = run(c, oracle.get());
  write_run_outputs(c, results, c.output_path);
  for (const RunResult& r : results) {
    const auto trace = compare_policies(r, *oracle);
    const std::filesystem::path path = std::filesystem::path(c.output_path) /
                                       (r.variant + "_seed" + std::to_string(r.seed) +
                                        "_similarity.csv");
    std::ofstream out(path);
    out << "slot,cosine_similarity\n";
    for (std::size_t t = 0; t < trace.size(); ++t) out << t << ',' << trace[t] << '\n';
    if (!o.quiet) {
      std::cout << r.variant << " seed " << r.seed << " final similarity " << trace.back()
                << "  -> " << path.string() << '\n';
    }
  }
  return 0;
}

int cmd_sweep(const CommonOptions& o, const std::vector<int>& sizes,
              const std::vector<std::string>& variants) {
  ExperimentConfig c = resolve(o);
  if (!sizes.empty()) c.sweep_cache_sizes = sizes;
  if (!variants.empty()) c.sweep_variants = variants;
  c.validate();
  const auto rows = sweep(c, c.sweep_cache_sizes, c.sweep_variants);
  const auto summary = summarize(rows);

  const std::filesystem::path dir(c.output_path);
  std::filesystem::create_directories(dir);
  std::ofstream long_out(dir / "sweep.csv");
  write_sweep_csv(rows, long_out);
  std::ofstream summary_out(dir / "sweep_summary.csv");
  write_summary_csv(summary, summary_out);
  std::ofstream manifest(dir / "manifest.txt");
  write_config(c, manifest);

  if (!o.quiet) {
    for (const SweepRow& r : rows) {
      if (r.status != "ok") {
        std::cerr << "warning: " << r.variant << " K=" << r.cache_capacity << " seed "
                  << r.seed << ' ' << r.status << '\n';
      }
    }
    for (const SweepSummary& s : summary) {
      std::cout << s.variant << " K=" << s.cache_capacity << " rho " << s.mean << " +- "
                << s.stddev << " (" << s.seeds << " seeds)\n";
    }
  }
  return 0;
}

int cmd_validate(const CommonOptions& o) {
  const ExperimentConfig c = resolve(o);
  if (!o.quiet) write_config(c, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative coded caching experiments"};
  app.require_subcommand(1);

  CommonOptions run_opts, sweep_opts, compare_opts, validate_opts;
  std::vector<int> sweep_sizes;
  std::vector<std::string> sweep_variants;

  auto* run_cmd = app.add_subcommand("run", "train and evaluate one agent per seed");
  add_common(run_cmd, run_opts);
  auto* sweep_cmd = app.add_subcommand("sweep", "converged rho across cache sizes and variants");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--cache-sizes", sweep_sizes, "cache sizes K")->delimiter(',');
  sweep_cmd->add_option("--variants", sweep_variants, "e.g. qlearning,vfa+uncoded,mpcc")
      ->delimiter(',');
  auto* compare_cmd =
      app.add_subcommand("compare", "cosine similarity of an agent to the value-iteration policy");
  add_common(compare_cmd, compare_opts);
  auto* validate_cmd = app.add_subcommand("validate-config", "check and print a configuration");
  add_common(validate_cmd, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run_cmd) return cmd_run(run_opts);
    if (*sweep_cmd) return cmd_sweep(sweep_opts, sweep_sizes, sweep_variants);
    if (*compare_cmd) return cmd_compare(compare_opts);
    if (*validate_cmd) return cmd_validate(validate_opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
