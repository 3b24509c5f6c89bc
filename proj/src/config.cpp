#include "cocache/config.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cocache/error.hpp"

namespace cocache {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"env",
       {"sbs_count", "catalog_size", "cache_capacity", "serving_set", "levels", "content_size",
        "requests_per_slot", "skewness", "transition_seed", "request_mode", "transitions",
        "white_box", "enumeration_cap", "snm_bursts", "snm_lifespan", "snm_boost"}},
      {"agent",
       {"kind", "cooperative", "epsilon", "gamma", "lambda", "lambda_decay", "omega1", "omega2",
        "delta", "tolerance"}},
      {"schedule", {"horizon", "switch_slot", "seeds", "metrics_window"}},
      {"output", {"path", "every"}},
      {"sweep", {"cache_sizes", "variants", "deltas", "nc_deltas"}},
  };
  return keys;
}

template <typename T>
T convert(const std::string& key, std::string text) {
  boost::algorithm::trim(text);
  if constexpr (std::is_same_v<T, bool>) {
    boost::algorithm::to_lower(text);
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key + ": expected a boolean, got '" + text + "'");
  } else {
    try {
      return boost::lexical_cast<T>(text);
    } catch (const boost::bad_lexical_cast&) {
      throw ConfigError(key + ": cannot parse '" + text + "'");
    }
  }
}

template <typename T>
std::vector<T> convert_list(const std::string& key, const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  std::vector<T> out;
  for (std::string& part : parts) {
    boost::algorithm::trim(part);
    if (part.empty()) continue;
    out.push_back(convert<T>(key, part));
  }
  if (out.empty()) throw ConfigError(key + ": empty list");
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < values.size(); ++i) out << (i ? "," : "") << values[i];
  return out.str();
}

RequestMode parse_request_mode(const std::string& text) {
  if (text == "multinomial") return RequestMode::kZipfMultinomial;
  if (text == "expected") return RequestMode::kDeterministicExpected;
  if (text == "shot_noise") return RequestMode::kShotNoise;
  throw ConfigError("env.request_mode: unknown mode '" + text + "'");
}

std::string to_string(RequestMode mode) {
  switch (mode) {
    case RequestMode::kZipfMultinomial: return "multinomial";
    case RequestMode::kDeterministicExpected: return "expected";
    case RequestMode::kShotNoise: return "shot_noise";
  }
  return "?";
}

TransitionDependence parse_transitions(const std::string& text) {
  if (text == "auto") return TransitionDependence::kAuto;
  if (text == "per_action") return TransitionDependence::kPerAction;
  if (text == "per_candidate") return TransitionDependence::kPerCandidate;
  throw ConfigError("env.transitions: unknown value '" + text + "'");
}

std::string to_string(TransitionDependence dep) {
  switch (dep) {
    case TransitionDependence::kAuto: return "auto";
    case TransitionDependence::kPerAction: return "per_action";
    case TransitionDependence::kPerCandidate: return "per_candidate";
  }
  return "?";
}

}  // namespace

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kValueIteration: return "value_iteration";
    case AgentKind::kQLearning: return "qlearning";
    case AgentKind::kVfa: return "vfa";
    case AgentKind::kMpcc: return "mpcc";
  }
  return "?";
}

std::string to_string(Discipline discipline) {
  return discipline == Discipline::kMds ? "mds" : "uncoded";
}

AgentKind parse_agent_kind(const std::string& text) {
  if (text == "value_iteration") return AgentKind::kValueIteration;
  if (text == "qlearning") return AgentKind::kQLearning;
  if (text == "vfa") return AgentKind::kVfa;
  if (text == "mpcc") return AgentKind::kMpcc;
  throw ConfigError("unknown agent '" + text + "'");
}

Discipline parse_discipline(const std::string& text) {
  if (text == "mds") return Discipline::kMds;
  if (text == "uncoded") return Discipline::kUncoded;
  throw ConfigError("unknown discipline '" + text + "'");
}

long ExperimentConfig::resolved_switch_slot() const {
  if (switch_slot) return *switch_slot;
  return env.params.cache_capacity == 1 ? 100'000 : 300'000;
}

long ExperimentConfig::resolved_horizon() const {
  if (horizon) return *horizon;
  return resolved_switch_slot() + 100'000;
}

void ExperimentConfig::validate() const {
  const long sw = resolved_switch_slot();
  const long hz = resolved_horizon();
  if (sw < 0) throw ConfigError("schedule.switch_slot must be >= 0");
  if (hz <= sw) throw ConfigError("schedule.horizon must exceed switch_slot");
  if (seeds.empty()) throw ConfigError("schedule.seeds needs at least one seed");
  if (metrics_window < 0) throw ConfigError("schedule.metrics_window must be >= 0");
  if (row_stride < 1) throw ConfigError("output.every must be >= 1");
  if (!(agent.epsilon >= 0.0 && agent.epsilon <= 1.0)) {
    throw ConfigError("agent.epsilon must lie in [0, 1]");
  }
  if (!(agent.gamma >= 0.0 && agent.gamma < 1.0)) {
    throw ConfigError("agent.gamma must lie in [0, 1)");
  }
  if (!(agent.lambda > 0.0 && agent.lambda <= 1.0)) {
    throw ConfigError("agent.lambda must lie in (0, 1]");
  }
  if (!(agent.lambda_decay >= 0.0 && agent.lambda_decay <= 1.0)) {
    throw ConfigError("agent.lambda_decay must lie in [0, 1]");
  }
  if (!(agent.delta > 0.0)) throw ConfigError("agent.delta must be positive");
  if (!(agent.omega1 > agent.omega2 && agent.omega2 > 0.0)) {
    throw ConfigError("agent weights need omega1 > omega2 > 0");
  }
  if (!(agent.tolerance > 0.0)) throw ConfigError("agent.tolerance must be positive");
  for (int k : sweep_cache_sizes) {
    if (k < 1) throw ConfigError("sweep.cache_sizes must be positive");
  }
  for (const std::string& v : sweep_variants) apply_variant(*this, v);
  for (const auto* deltas : {&sweep_deltas, &sweep_nc_deltas}) {
    if (!deltas->empty() && deltas->size() != sweep_cache_sizes.size()) {
      throw ConfigError("sweep deltas need one value per cache size");
    }
    for (double d : *deltas) {
      if (!(d > 0.0)) throw ConfigError("sweep deltas must be positive");
    }
  }

  const bool needs_model =
      agent.kind == AgentKind::kValueIteration || agent.kind == AgentKind::kQLearning;
  if (needs_model && !env.white_box) {
    throw ConfigError(to_string(agent.kind) + " needs env.white_box = true");
  }
  if (agent.kind == AgentKind::kValueIteration && env.request_mode == RequestMode::kShotNoise) {
    throw ConfigError("value_iteration has no exact model under shot-noise requests");
  }
  if (discipline == Discipline::kUncoded && env.params.levels > 64) {
    throw ConfigError("uncoded discipline supports at most 64 levels");
  }
  effective_env(*this).validate();
}

ExperimentConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) {
      throw ConfigError(body.empty() ? "key '" + section + "' outside a section"
                                     : "unknown section [" + section + "]");
    }
    for (const auto& entry : body) {
      if (!it->second.contains(entry.first)) {
        throw ConfigError("unknown key " + section + "." + entry.first);
      }
    }
  }

  ExperimentConfig c;
  auto get = [&](const std::string& path) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(path, '.'))) return *v;
    return std::nullopt;
  };
  auto read = [&]<typename T>(const std::string& path, T& field) {
    if (auto v = get(path)) field = convert<T>(path, *v);
  };

  SystemParams& s = c.env.params;
  read("env.sbs_count", s.sbs_count);
  read("env.catalog_size", s.catalog_size);
  read("env.cache_capacity", s.cache_capacity);
  read("env.serving_set", s.serving_set);
  read("env.levels", s.levels);
  read("env.content_size", s.content_size);
  read("env.requests_per_slot", s.requests_per_slot);
  if (auto v = get("env.skewness")) c.env.skewness = convert_list<double>("env.skewness", *v);
  read("env.transition_seed", c.env.transition_seed);
  if (auto v = get("env.request_mode")) c.env.request_mode = parse_request_mode(*v);
  if (auto v = get("env.transitions")) c.env.transitions = parse_transitions(*v);
  read("env.white_box", c.env.white_box);
  read("env.enumeration_cap", c.env.enumeration_cap);
  read("env.snm_bursts", c.env.snm.bursts);
  read("env.snm_lifespan", c.env.snm.mean_lifespan);
  read("env.snm_boost", c.env.snm.boost);

  if (auto v = get("agent.kind")) c.agent.kind = parse_agent_kind(*v);
  read("agent.cooperative", c.agent.cooperative);
  read("agent.epsilon", c.agent.epsilon);
  read("agent.gamma", c.agent.gamma);
  read("agent.lambda", c.agent.lambda);
  read("agent.lambda_decay", c.agent.lambda_decay);
  read("agent.omega1", c.agent.omega1);
  read("agent.omega2", c.agent.omega2);
  read("agent.delta", c.agent.delta);
  read("agent.tolerance", c.agent.tolerance);

  if (auto v = get("schedule.horizon")) c.horizon = convert<long>("schedule.horizon", *v);
  if (auto v = get("schedule.switch_slot")) {
    c.switch_slot = convert<long>("schedule.switch_slot", *v);
  }
  if (auto v = get("schedule.seeds")) {
    c.seeds = convert_list<std::uint64_t>("schedule.seeds", *v);
  }
  read("schedule.metrics_window", c.metrics_window);

  read("output.path", c.output_path);
  read("output.every", c.row_stride);

  if (auto v = get("sweep.cache_sizes")) {
    c.sweep_cache_sizes = convert_list<int>("sweep.cache_sizes", *v);
  }
  if (auto v = get("sweep.variants")) {
    c.sweep_variants = convert_list<std::string>("sweep.variants", *v);
  }
  if (auto v = get("sweep.deltas")) c.sweep_deltas = convert_list<double>("sweep.deltas", *v);
  if (auto v = get("sweep.nc_deltas")) {
    c.sweep_nc_deltas = convert_list<double>("sweep.nc_deltas", *v);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

void write_config(const ExperimentConfig& c, std::ostream& out) {
  const SystemParams& s = c.env.params;
  out << std::setprecision(17) << std::boolalpha;
  out << "[env]\n"
      << "sbs_count = " << s.sbs_count << '\n'
      << "catalog_size = " << s.catalog_size << '\n'
      << "cache_capacity = " << s.cache_capacity << '\n'
      << "serving_set = " << s.serving_set << '\n'
      << "levels = " << s.levels << '\n'
      << "content_size = " << s.content_size << '\n'
      << "requests_per_slot = " << s.requests_per_slot << '\n'
      << "skewness = " << join(c.env.skewness) << '\n'
      << "transition_seed = " << c.env.transition_seed << '\n'
      << "request_mode = " << to_string(c.env.request_mode) << '\n'
      << "transitions = " << to_string(c.env.transitions) << '\n'
      << "white_box = " << c.env.white_box << '\n'
      << "enumeration_cap = " << c.env.enumeration_cap << '\n'
      << "snm_bursts = " << c.env.snm.bursts << '\n'
      << "snm_lifespan = " << c.env.snm.mean_lifespan << '\n'
      << "snm_boost = " << c.env.snm.boost << '\n';
  out << "\n[agent]\n"
      << "kind = " << to_string(c.agent.kind) << '\n'
      << "cooperative = " << c.agent.cooperative << '\n'
      << "epsilon = " << c.agent.epsilon << '\n'
      << "gamma = " << c.agent.gamma << '\n'
      << "lambda = " << c.agent.lambda << '\n'
      << "lambda_decay = " << c.agent.lambda_decay << '\n'
      << "omega1 = " << c.agent.omega1 << '\n'
      << "omega2 = " << c.agent.omega2 << '\n'
      << "delta = " << c.agent.delta << '\n'
      << "tolerance = " << c.agent.tolerance << '\n';
  out << "\n[schedule]\n"
      << "horizon = " << c.resolved_horizon() << '\n'
      << "switch_slot = " << c.resolved_switch_slot() << '\n'
      << "seeds = " << join(c.seeds) << '\n'
      << "metrics_window = " << c.metrics_window << '\n';
  out << "\n[output]\n"
      << "path = " << c.output_path << '\n'
      << "every = " << c.row_stride << '\n';
  out << "\n[sweep]\n"
      << "cache_sizes = " << join(c.sweep_cache_sizes) << '\n'
      << "variants = " << join(c.sweep_variants) << '\n';
  if (!c.sweep_deltas.empty()) out << "deltas = " << join(c.sweep_deltas) << '\n';
  if (!c.sweep_nc_deltas.empty()) out << "nc_deltas = " << join(c.sweep_nc_deltas) << '\n';
}

ExperimentConfig apply_variant(ExperimentConfig config, const std::string& variant) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, variant, boost::algorithm::is_any_of("+"));
  config.agent.kind = parse_agent_kind(boost::algorithm::trim_copy(parts.front()));
  config.discipline = Discipline::kMds;
  config.agent.cooperative = true;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const std::string flag = boost::algorithm::trim_copy(parts[i]);
    if (flag == "uncoded") {
      config.discipline = Discipline::kUncoded;
    } else if (flag == "nc") {
      config.agent.cooperative = false;
    } else {
      throw ConfigError("unknown variant modifier '" + flag + "' in '" + variant + "'");
    }
  }
  return config;
}

std::string variant_label(const ExperimentConfig& config) {
  std::string label = to_string(config.agent.kind);
  if (config.discipline == Discipline::kUncoded) label += "+uncoded";
  if (!config.agent.cooperative) label += "+nc";
  return label;
}

EnvConfig effective_env(const ExperimentConfig& config) {
  EnvConfig env = config.env;
  if (!config.agent.cooperative) {
    env.params.serving_set = 1;
    env.granularity = Granularity::kFullContent;
  }
  return env;
}

}  // namespace cocache
