#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "cocache/agents.hpp"
#include "cocache/env.hpp"

using namespace cocache;

namespace {

// V^pi = (I - gamma P_pi)^-1 r_pi for a deterministic policy.
Eigen::VectorXd evaluate(const TabularMdp& mdp, const std::vector<std::size_t>& policy,
                         double gamma) {
  const auto n = static_cast<Eigen::Index>(mdp.num_states());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  std::vector<Transition> succ;
  for (Eigen::Index s = 0; s < n; ++s) {
    mdp.successors(s, policy[s], succ);
    for (const auto& t : succ) {
      p(s, static_cast<Eigen::Index>(t.next_state)) += t.probability;
      r(s) += t.probability * t.reward;
    }
  }
  return (Eigen::MatrixXd::Identity(n, n) - gamma * p).partialPivLu().solve(r);
}

// Best value per state over every deterministic policy.
Eigen::VectorXd brute_force_optimum(const TabularMdp& mdp, double gamma) {
  const std::size_t n = mdp.num_states();
  const std::size_t m = mdp.num_actions();
  std::vector<std::size_t> policy(n, 0);
  Eigen::VectorXd best = Eigen::VectorXd::Constant(n, -1e300);
  while (true) {
    best = best.cwiseMax(evaluate(mdp, policy, gamma));
    std::size_t i = 0;
    while (i < n && ++policy[i] == m) policy[i++] = 0;
    if (i == n) break;
  }
  return best;
}

TabularMdp random_mdp(std::size_t states, std::size_t actions, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  TabularMdp mdp(states, actions);
  for (std::size_t s = 0; s < states; ++s) {
    for (std::size_t a = 0; a < actions; ++a) {
      std::vector<double> w(states);
      double sum = 0.0;
      for (double& x : w) sum += (x = u(rng));
      for (std::size_t t = 0; t < states; ++t) mdp.add(s, a, t, w[t] / sum, 10.0 * u(rng) - 3.0);
    }
  }
  return mdp;
}

}  // namespace

TEST(ValueIteration, SelfLoopGeometricSeries) {
  TabularMdp mdp(1, 1);
  mdp.add(0, 0, 0, 1.0, 3.0);
  const auto res = value_iteration(mdp, 0.9, 1e-12);
  EXPECT_NEAR(res.values[0], 3.0 / (1.0 - 0.9), 1e-9);
  EXPECT_LE(res.residual, 1e-11);
}

TEST(ValueIteration, TwoStateMatchesLinearSolve) {
  // Action 1 in state 0 pays less now but moves to the rich state.
  TabularMdp mdp(2, 2);
  mdp.add(0, 0, 0, 1.0, 1.0);
  mdp.add(0, 1, 1, 1.0, 0.0);
  mdp.add(1, 0, 1, 0.8, 2.0);
  mdp.add(1, 0, 0, 0.2, 2.0);
  mdp.add(1, 1, 0, 1.0, 2.5);
  const double gamma = 0.9;
  const auto res = value_iteration(mdp, gamma, 1e-12);
  const Eigen::VectorXd oracle = brute_force_optimum(mdp, gamma);
  EXPECT_NEAR(res.values[0], oracle(0), 1e-8);
  EXPECT_NEAR(res.values[1], oracle(1), 1e-8);
  const Eigen::VectorXd v_pi = evaluate(mdp, res.policy, gamma);
  EXPECT_NEAR(v_pi(0), oracle(0), 1e-8);
  EXPECT_NEAR(v_pi(1), oracle(1), 1e-8);
  EXPECT_EQ(res.policy[0], 1u);
}

TEST(ValueIteration, RandomMdpsMatchBruteForce) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto mdp = random_mdp(4, 3, seed);
    const auto res = value_iteration(mdp, 0.8, 1e-12);
    const Eigen::VectorXd oracle = brute_force_optimum(mdp, 0.8);
    for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(res.values[s], oracle(s), 1e-8);
    EXPECT_LE(res.residual, 1e-11);
  }
}

TEST(ValueIteration, PolicyIsGreedyFixedPoint) {
  const auto mdp = random_mdp(5, 4, 77);
  const auto res = value_iteration(mdp, 0.9, 1e-12);
  for (std::size_t s = 0; s < 5; ++s) {
    const auto q = action_values(mdp, res.values, 0.9, s);
    const double best = *std::max_element(q.begin(), q.end());
    EXPECT_NEAR(q[res.policy[s]], best, 1e-12);
    EXPECT_NEAR(res.values[s], best, 1e-9);
  }
}

TEST(ValueIteration, TiesGoToLowestAction) {
  TabularMdp mdp(1, 3);
  for (std::size_t a = 0; a < 3; ++a) mdp.add(0, a, 0, 1.0, 1.0);
  EXPECT_EQ(value_iteration(mdp, 0.5, 1e-12).policy[0], 0u);
}

TEST(ValueIteration, RejectsBadGamma) {
  TabularMdp mdp(1, 1);
  mdp.add(0, 0, 0, 1.0, 1.0);
  EXPECT_THROW(value_iteration(mdp, 1.0, 1e-9), std::invalid_argument);
  EXPECT_THROW(value_iteration(mdp, -0.1, 1e-9), std::invalid_argument);
}

TEST(ValueIteration, ExactModelResidualSmall) {
  EnvConfig cfg;
  cfg.params.catalog_size = 4;
  cfg.params.cache_capacity = 1;
  cfg.params.levels = 2;
  cfg.params.serving_set = 2;
  Environment env(cfg);
  const auto model = env.exact_model();
  const auto res = value_iteration(model, 0.9, 1e-10);
  EXPECT_LE(res.residual, 1e-9);
  ValueIterationAgent agent(model, 0.9, 1e-10);
  const auto obs = env.reset(1);
  EXPECT_EQ(agent.greedy(obs), model.space()[res.policy[agent.state_of(obs)]]);
}
