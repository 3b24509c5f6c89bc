#include <algorithm>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "cocache/agents.hpp"

namespace cocache {
namespace {

// (1 - d a) u(1 - d a)
double coverage_gap(int level, const SystemParams& sys) {
  const double v = 1.0 - sys.serving_set * (static_cast<double>(level) / sys.levels);
  return v * unit_step(v);
}

// (a - a_prev) u(a - a_prev)
double growth(int level, int prev_level, const SystemParams& sys) {
  const double v = static_cast<double>(level - prev_level) / sys.levels;
  return v * unit_step(v);
}

void check_shapes(const VfaParams& params, std::size_t catalog) {
  if (params.eta.size() != catalog || params.xi.size() != catalog) {
    throw std::invalid_argument("VFA parameters do not match the catalog size");
  }
}

}  // namespace

double unit_step(double v) { return v >= 0.0 ? 1.0 : 0.0; }

VfaParams VfaParams::zeros(std::size_t catalog_size) {
  VfaParams p;
  p.eta.assign(catalog_size, 0.0);
  p.xi.assign(catalog_size, 0.0);
  return p;
}

void VfaParams::save(std::ostream& out) const {
  out << "vfa " << eta.size() << '\n' << std::setprecision(17);
  out << beta << ' ' << omega1 << ' ' << omega2 << ' ' << delta << ' ' << gamma << '\n';
  for (const auto* vec : {&eta, &xi}) {
    for (std::size_t i = 0; i < vec->size(); ++i) out << (i ? " " : "") << (*vec)[i];
    out << '\n';
  }
}

VfaParams VfaParams::load(std::istream& in) {
  std::string tag;
  std::size_t catalog = 0;
  if (!(in >> tag >> catalog) || tag != "vfa") throw std::runtime_error("not a vfa snapshot");
  VfaParams p = zeros(catalog);
  if (!(in >> p.beta >> p.omega1 >> p.omega2 >> p.delta >> p.gamma)) {
    throw std::runtime_error("truncated vfa snapshot");
  }
  for (auto* vec : {&p.eta, &p.xi}) {
    for (double& v : *vec) {
      if (!(in >> v)) throw std::runtime_error("truncated vfa snapshot");
    }
  }
  return p;
}

double vfa_qhat(const VfaParams& params, const PopularityProfile& theta,
                const CachingAction& action, const CachingAction& prev_action, int serving_set,
                int levels) {
  check_shapes(params, action.size());
  SystemParams sys;
  sys.serving_set = serving_set;
  sys.levels = levels;
  double coverage = 0.0;
  double updates = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    coverage += params.eta[i] * theta.theta[i] * coverage_gap(action.levels[i], sys);
    updates += params.xi[i] * growth(action.levels[i], prev_action.levels[i], sys);
  }
  return params.beta - params.omega1 * coverage - params.omega2 * updates;
}

double coverage_penalty(std::span<const double> coefficients, const CachingAction& action,
                        const SystemParams& sys) {
  double penalty = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    penalty += coefficients[i] * coverage_gap(action.levels[i], sys);
  }
  return penalty;
}

std::vector<int> level_block_sizes(const SystemParams& sys, int catalog_size) {
  const int top = sys.max_level();
  const int budget = sys.level_budget();
  std::vector<int> z(top + 1, 0);
  int spent = 0;   // sum of j * z_j over the levels fixed so far
  int placed = 0;  // contents assigned so far
  for (int i = top; i >= 1; --i) {
    // Blocks that would need more contents than the catalog has are clamped;
    // their budget falls through to the next lower level.
    z[i] = std::min((budget - spent) / i, catalog_size - placed);
    spent += i * z[i];
    placed += z[i];
  }
  return z;
}

std::vector<std::size_t> rank_by_coefficient(std::span<const double> coefficients) {
  std::vector<std::size_t> order(coefficients.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return coefficients[a] > coefficients[b];
  });
  return order;
}

CachingAction coarse_assignment(std::span<const double> coefficients, const SystemParams& sys) {
  const int catalog = static_cast<int>(coefficients.size());
  const std::vector<int> z = level_block_sizes(sys, catalog);
  const std::vector<std::size_t> order = rank_by_coefficient(coefficients);
  CachingAction action{std::vector<int>(catalog, 0), sys.max_level()};
  std::size_t pos = 0;
  for (int level = sys.max_level(); level >= 1; --level) {
    for (int k = 0; k < z[level]; ++k) action.levels[order[pos++]] = level;
  }
  return action;
}

CachingAction fine_tune(std::span<const double> coefficients, CachingAction coarse,
                        const SystemParams& sys) {
  const int top = sys.max_level();
  const double top_gap = 1.0 - sys.serving_set * static_cast<double>(top) / sys.levels;
  if (!(top_gap < 0.0)) return coarse;

  const int catalog = static_cast<int>(coefficients.size());
  const std::vector<int> z = level_block_sizes(sys, catalog);
  const std::vector<std::size_t> order = rank_by_coefficient(coefficients);
  const int top_block = z[top];
  const int first_receiver = top_block + (top >= 2 ? z[top - 1] : 0);
  // Dropping a top-level content one level re-opens this share of it.
  const double loss_factor = coverage_gap(top - 1, sys) - coverage_gap(top, sys);

  for (int j = top_block - 1; j >= 0; --j) {
    const std::size_t giver = order[j];
    for (int jp = first_receiver; jp < catalog; ++jp) {
      const std::size_t receiver = order[jp];
      const int level = coarse.levels[receiver];
      if (level >= top) continue;
      const double gain = coefficients[receiver] *
                          (coverage_gap(level, sys) - coverage_gap(level + 1, sys));
      if (loss_factor * coefficients[giver] < gain) {
        --coarse.levels[giver];
        ++coarse.levels[receiver];
        break;
      }
    }
  }
  return coarse;
}

CachingAction vfa_select(const VfaParams& params, const PopularityProfile& theta,
                         const CachingAction& /*prev_action*/, const SystemParams& sys) {
  check_shapes(params, theta.size());
  std::vector<double> coefficients(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    coefficients[i] = params.eta[i] * theta.theta[i];
  }
  return fine_tune(coefficients, coarse_assignment(coefficients, sys), sys);
}

VfaGradient vfa_loss_gradient(const VfaParams& params, const PopularityProfile& theta,
                              const CachingAction& action, const CachingAction& prev_action,
                              double target, const SystemParams& sys) {
  const double error =
      target - vfa_qhat(params, theta, action, prev_action, sys.serving_set, sys.levels);
  VfaGradient grad;
  grad.beta = -2.0 * error;
  grad.eta.resize(action.size());
  grad.xi.resize(action.size());
  for (std::size_t i = 0; i < action.size(); ++i) {
    grad.eta[i] = 2.0 * error * params.omega1 * theta.theta[i] * coverage_gap(action.levels[i], sys);
    grad.xi[i] = 2.0 * error * params.omega2 * growth(action.levels[i], prev_action.levels[i], sys);
  }
  return grad;
}

double vfa_update(VfaParams& params, const EnvObservation& obs, const CachingAction& action,
                  double reward, const EnvObservation& next_obs, const SystemParams& sys) {
  const CachingAction estimate = vfa_select(params, next_obs.theta, next_obs.prev_action, sys);
  const double target = reward + params.gamma * vfa_qhat(params, next_obs.theta, estimate,
                                                         next_obs.prev_action, sys.serving_set,
                                                         sys.levels);
  const double error =
      target - vfa_qhat(params, obs.theta, action, obs.prev_action, sys.serving_set, sys.levels);
  const VfaGradient grad =
      vfa_loss_gradient(params, obs.theta, action, obs.prev_action, target, sys);
  params.beta -= params.delta * grad.beta;
  for (std::size_t i = 0; i < action.size(); ++i) {
    params.eta[i] -= params.delta * grad.eta[i];
    params.xi[i] -= params.delta * grad.xi[i];
  }
  return error;
}

VfaAgent::VfaAgent(SystemParams sys, Granularity granularity, VfaParams params)
    : sys_(sys), sampler_(sys, granularity), params_(std::move(params)) {
  if (granularity == Granularity::kFullContent && sys.max_level() != sys.levels) {
    throw std::invalid_argument("full-content VFA needs d = 1");
  }
  check_shapes(params_, static_cast<std::size_t>(sys.catalog_size));
  if (!(params_.omega1 > params_.omega2 && params_.omega2 > 0.0)) {
    throw std::invalid_argument("VFA weights need omega1 > omega2 > 0");
  }
}

CachingAction VfaAgent::select(const EnvObservation& obs, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (epsilon > 0.0 && unit(rng) < epsilon) return sampler_.sample(rng);
  return greedy(obs);
}

CachingAction VfaAgent::greedy(const EnvObservation& obs) const {
  return vfa_select(params_, obs.theta, obs.prev_action, sys_);
}

void VfaAgent::update(const EnvObservation& obs, const CachingAction& action, double reward,
                      const EnvObservation& next_obs) {
  vfa_update(params_, obs, action, reward, next_obs, sys_);
}

}  // namespace cocache
