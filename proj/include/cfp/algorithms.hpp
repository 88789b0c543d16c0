#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "cfp/errors.hpp"
#include "cfp/graph.hpp"
#include "cfp/problem.hpp"
#include "cfp/solver_config.hpp"
#include "cfp/switching.hpp"

namespace cfp {

namespace detail {

inline void check_state_finite(const Eigen::VectorXd& x, const char* where) {
  if (!x.allFinite()) {
    throw NonFinite(std::string(where) + ": agent state left the finite range");
  }
}

inline void check_state_bounded(const Eigen::VectorXd& x, double threshold, const char* where) {
  check_state_finite(x, where);
  if (x.norm() > threshold) {
    throw Divergence(std::string(where) + ": agent state norm exceeded " +
                     std::to_string(threshold));
  }
}

inline void check_agents(const std::vector<Eigen::VectorXd>& states, const Digraph& g,
                         const ProblemSpec& spec) {
  if (static_cast<int>(states.size()) != spec.agent_count() || g.size() != spec.agent_count()) {
    throw DimensionMismatch("agent count mismatch between states, graph and problem");
  }
  for (const auto& x : states) {
    if (x.size() != spec.dim) throw DimensionMismatch("agent state dimension mismatch");
  }
}

/// Consensus coupling sum_j a_ij (x_j - x_i) for every agent.
inline std::vector<Eigen::VectorXd> consensus_terms(const std::vector<Eigen::VectorXd>& states,
                                                    const Digraph& g) {
  const int n = static_cast<int>(states.size());
  std::vector<Eigen::VectorXd> mix(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(states[i].size());
    for (int j = 0; j < n; ++j) {
      const double a = g.weights()(i, j);
      if (a > 0.0) acc.noalias() += a * (states[j] - states[i]);
    }
    mix[i] = std::move(acc);
  }
  return mix;
}

}  // namespace detail

/// Right-hand side of the centralized continuous flow:
///   xdot = -alpha(t) [x - P_X(x)] - beta(t) grad g+(x)
inline Eigen::VectorXd centralized_continuous_rhs(const Eigen::VectorXd& x, double t,
                                                  const AgentConstraint& agent,
                                                  const SolverConfig& cfg) {
  return -cfg.alpha.at(t) * (x - project(agent.set, x)) -
         cfg.beta.at(t) * subgradient_plus(agent.inequality, x);
}

/// One explicit Euler step of the centralized continuous flow.
inline Eigen::VectorXd centralized_continuous_step(const Eigen::VectorXd& x, double t,
                                                   const AgentConstraint& agent,
                                                   const SolverConfig& cfg) {
  detail::check_state_finite(x, "centralized continuous");
  Eigen::VectorXd next = x + cfg.dt * centralized_continuous_rhs(x, t, agent, cfg);
  detail::check_state_bounded(next, cfg.numeric.divergence_threshold, "centralized continuous");
  return next;
}

/// One iteration of the centralized discrete algorithm:
///   xi  = x - beta(t) grad g+(x)
///   phi = alpha(t) (xi - P_X(xi))
///   x'  = xi - phi
inline Eigen::VectorXd centralized_discrete_step(const Eigen::VectorXd& x, long t,
                                                 const AgentConstraint& agent,
                                                 const SolverConfig& cfg) {
  detail::check_state_finite(x, "centralized discrete");
  const double a = cfg.alpha.at(static_cast<double>(t));
  if (a < 0.0 || a > 1.0) {
    throw ScheduleViolation("alpha(" + std::to_string(t) + ") = " + std::to_string(a) +
                            " outside [0, 1]");
  }
  const Eigen::VectorXd xi =
      x - cfg.beta.at(static_cast<double>(t)) * subgradient_plus(agent.inequality, x);
  Eigen::VectorXd next = xi - a * (xi - project(agent.set, xi));
  detail::check_state_bounded(next, cfg.numeric.divergence_threshold, "centralized discrete");
  return next;
}

/// Right-hand side of the distributed continuous flow on a fixed graph:
///   xdot_i = sum_j a_ij (x_j - x_i) - tau([x_i - P_{X_i}(x_i)] + grad g_i+(x_i))
inline std::vector<Eigen::VectorXd> distributed_continuous_rhs(
    const std::vector<Eigen::VectorXd>& states, const Digraph& g, const ProblemSpec& spec,
    double tau) {
  detail::check_agents(states, g, spec);
  std::vector<Eigen::VectorXd> rhs = detail::consensus_terms(states, g);
  for (int i = 0; i < spec.agent_count(); ++i) {
    const auto& agent = spec.agents[i];
    rhs[i] -= tau * ((states[i] - project(agent.set, states[i])) +
                     subgradient_plus(agent.inequality, states[i]));
  }
  return rhs;
}

/// One synchronous Euler step of the distributed continuous flow.
inline std::vector<Eigen::VectorXd> distributed_continuous_step(
    const std::vector<Eigen::VectorXd>& states, double t, const Digraph& g,
    const ProblemSpec& spec, const SolverConfig& cfg) {
  (void)t;  // the fixed-graph flow is autonomous
  auto rhs = distributed_continuous_rhs(states, g, spec, cfg.tau);
  std::vector<Eigen::VectorXd> next(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    next[i] = states[i] + cfg.dt * rhs[i];
    detail::check_state_bounded(next[i], cfg.numeric.divergence_threshold,
                                "distributed continuous");
  }
  return next;
}

/// Switching-topology overload; reads the graph active at time t. Callers
/// stepping across segment boundaries should align steps so no step
/// straddles a switch.
inline std::vector<Eigen::VectorXd> distributed_continuous_step(
    const std::vector<Eigen::VectorXd>& states, double t, const SwitchingSchedule& schedule,
    const ProblemSpec& spec, const SolverConfig& cfg) {
  return distributed_continuous_step(states, t, schedule.graph_at(t), spec, cfg);
}

/// Per-step internals of the discrete distributed iteration, exposed for
/// runtime property checks.
struct DiscreteStepDetail {
  std::vector<Eigen::VectorXd> mixed;          ///< y_i = x_i + h sum_j a_ij (x_j - x_i)
  std::vector<Eigen::VectorXd> subgrad_terms;  ///< beta(t) grad g_i+(y_i)
};

/// One iteration of the discrete distributed algorithm:
///   y_i   = x_i + h sum_j a_ij (x_j - x_i)
///   nab_i = beta(t) grad g_i+(y_i)
///   xi_i  = y_i - nab_i
///   x_i'  = xi_i - alpha(t) (xi_i - P_{X_i}(xi_i))
///
/// Requires h in (0, step_size_bound(g)) unless the override flag is set.
inline std::vector<Eigen::VectorXd> distributed_discrete_step(
    const std::vector<Eigen::VectorXd>& states, long t, const Digraph& g,
    const ProblemSpec& spec, const SolverConfig& cfg, DiscreteStepDetail* detail_out = nullptr) {
  detail::check_agents(states, g, spec);
  if (!(cfg.h > 0.0)) throw StepSizeViolation("consensus gain h must be positive");
  if (!cfg.allow_step_size_override) {
    const double rho = step_size_bound(g, cfg.numeric);
    if (!(cfg.h < rho)) {
      throw StepSizeViolation("h = " + std::to_string(cfg.h) + " is not below the bound " +
                              std::to_string(rho) + " (set the override flag to experiment)");
    }
  }
  const double a = cfg.alpha.at(static_cast<double>(t));
  if (a < 0.0 || a > 1.0) {
    throw ScheduleViolation("alpha(" + std::to_string(t) + ") = " + std::to_string(a) +
                            " outside [0, 1]");
  }
  const double b = cfg.beta.at(static_cast<double>(t));

  auto mix = detail::consensus_terms(states, g);
  const int n = spec.agent_count();
  std::vector<Eigen::VectorXd> next(n);
  if (detail_out) {
    detail_out->mixed.resize(n);
    detail_out->subgrad_terms.resize(n);
  }
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd y = states[i] + cfg.h * mix[i];
    const Eigen::VectorXd nab = b * subgradient_plus(spec.agents[i].inequality, y);
    const Eigen::VectorXd xi = y - nab;
    next[i] = xi - a * (xi - project(spec.agents[i].set, xi));
    detail::check_state_bounded(next[i], cfg.numeric.divergence_threshold,
                                "distributed discrete");
    if (detail_out) {
      detail_out->mixed[i] = y;
      detail_out->subgrad_terms[i] = nab;
    }
  }
  return next;
}

/// Right-hand side of the gradient flow for linear-inequality blocks:
///   xdot_i = sum_j a_ij (x_j - x_i)
///            - tau(A_i^T (A_i x_i - b_i)+ + x_i - P_{X_i}(x_i))
///
/// Every agent must hold a LinearBlock inequality. The penalty direction is
/// A^T (A x - b)+, half the gradient of ||(A x - b)+||^2; the factor two is
/// absorbed into tau.
inline std::vector<Eigen::VectorXd> linear_cfp_rhs(const std::vector<Eigen::VectorXd>& states,
                                                   const Digraph& g, const ProblemSpec& spec,
                                                   double tau) {
  detail::check_agents(states, g, spec);
  std::vector<Eigen::VectorXd> rhs = detail::consensus_terms(states, g);
  for (int i = 0; i < spec.agent_count(); ++i) {
    const auto* block = std::get_if<LinearBlockFn>(&spec.agents[i].inequality.fn());
    if (!block) {
      throw WrongInequalityKind("the linear-inequality flow needs LinearBlock inequalities (agent " +
                                std::to_string(i + 1) + ")");
    }
    const auto [psi, dir] =
        psi_value_and_grad(block->a, block->b, states[i], /*unscaled_direction=*/true);
    rhs[i] -= tau * (dir + states[i] - project(spec.agents[i].set, states[i]));
  }
  return rhs;
}

/// One synchronous Euler step of the linear-inequality gradient flow.
inline std::vector<Eigen::VectorXd> linear_cfp_step(const std::vector<Eigen::VectorXd>& states,
                                                    double t, const Digraph& g,
                                                    const ProblemSpec& spec,
                                                    const SolverConfig& cfg) {
  (void)t;
  auto rhs = linear_cfp_rhs(states, g, spec, cfg.tau);
  std::vector<Eigen::VectorXd> next(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    next[i] = states[i] + cfg.dt * rhs[i];
    detail::check_state_bounded(next[i], cfg.numeric.divergence_threshold, "linear-inequality flow");
  }
  return next;
}

}  // namespace cfp
