#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cfp/errors.hpp"
#include "cfp/graph.hpp"
#include "cfp/problem.hpp"
#include "cfp/solver_config.hpp"
#include "cfp/switching.hpp"

namespace cfp {

enum class Algorithm {
  CentralizedContinuous,
  CentralizedDiscrete,
  DistributedContinuous,
  DistributedDiscrete,
  LinearCfp,
};

inline bool is_discrete(Algorithm a) {
  return a == Algorithm::CentralizedDiscrete || a == Algorithm::DistributedDiscrete;
}

inline bool is_centralized(Algorithm a) {
  return a == Algorithm::CentralizedContinuous || a == Algorithm::CentralizedDiscrete;
}

/// Which runtime property checks a run evaluates every step.
struct AssertionConfig {
  /// Enable the per-step Lyapunov decay checks (needs `reference`).
  bool lyapunov = false;
  /// A known feasible point of the problem, anchoring the decay checks.
  std::optional<Eigen::VectorXd> reference;
  /// Additive slack for the discrete per-step inequality.
  double discrete_tol = 1e-10;
  /// Allowed (dV - dt * bound) / dt^2 for the continuous flows.
  double continuous_order_constant = 1e3;
  /// Throw AssertionFailure on violation instead of only recording it.
  bool abort_on_violation = true;
};

using Topology = std::variant<Digraph, SwitchingSchedule>;

/// Everything one run needs: the problem, who talks to whom, which
/// iteration to use and with what gains, and where the agents start.
struct Scenario {
  ProblemSpec problem;
  Topology topology;
  Algorithm algorithm = Algorithm::DistributedContinuous;
  SolverConfig config;
  std::vector<Eigen::VectorXd> initial_states;
  AssertionConfig assertions;
  std::optional<Eigen::VectorXd> expected_point;

  int topology_size() const {
    return std::visit([](const auto& t) { return t.size(); }, topology);
  }

  void validate() const {
    problem.validate();
    config.validate();
    if (is_centralized(algorithm) && problem.agent_count() != 1) {
      throw InvalidParams("centralized algorithms take a single-agent problem");
    }
    if (topology_size() != problem.agent_count()) {
      throw DimensionMismatch("topology size does not match the agent count");
    }
    if (static_cast<int>(initial_states.size()) != problem.agent_count()) {
      throw DimensionMismatch("initial state count does not match the agent count");
    }
    for (const auto& x : initial_states) {
      if (x.size() != problem.dim) throw DimensionMismatch("initial state dimension mismatch");
    }
    if (assertions.reference && assertions.reference->size() != problem.dim) {
      throw DimensionMismatch("assertion reference point dimension mismatch");
    }
    if (is_discrete(algorithm) && std::holds_alternative<SwitchingSchedule>(topology)) {
      throw InvalidParams("discrete algorithms run on a fixed digraph");
    }
    if (algorithm == Algorithm::LinearCfp) {
      for (const auto& agent : problem.agents) {
        if (!agent.inequality.is_linear_block()) {
          throw WrongInequalityKind("the linear-inequality flow needs LinearBlock inequalities");
        }
      }
    }
  }
};

namespace detail {
inline Eigen::VectorXd vec2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}
}  // namespace detail

/// The planar five-agent feasibility problem driving the bundled cases:
/// agents 1-2 hold boxes, agents 3-5 hold one linear inequality each.
inline ProblemSpec builtin_problem() {
  using detail::vec2;
  ProblemSpec p;
  p.dim = 2;
  p.agents.reserve(5);
  p.agents.push_back({ConvexInequality::constant(-1.0, 2), Box{vec2(2.0, 0.0), vec2(4.0, 2.0)}});
  p.agents.push_back({ConvexInequality::constant(-1.0, 2), Box{vec2(2.5, 1.0), vec2(4.5, 3.0)}});
  p.agents.push_back({ConvexInequality::linear(vec2(2.0, -3.0), 2.0), WholeSpace{}});
  p.agents.push_back({ConvexInequality::linear(vec2(2.0, 3.0), 11.0), WholeSpace{}});
  p.agents.push_back({ConvexInequality::linear(vec2(8.0, -3.0), 28.0), WholeSpace{}});
  return p;
}

/// Strongly connected unit-weight digraph for the fixed-topology cases:
/// each agent receives from its two ring predecessors. All nonzero
/// Laplacian eigenvalues have real part 2.5, fast enough to reach tight
/// consensus tolerances within a short horizon.
inline Digraph builtin_fixed_graph() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) {
    a(i, (i + 4) % 5) = 1.0;
    a(i, (i + 3) % 5) = 1.0;
  }
  return Digraph(std::move(a));
}

/// Two bidirectional unit-weight subgraphs alternating every 0.2 s; their
/// union is a ring, so the induced delta-graph (T = 0.4, delta = 0.2) is
/// strongly connected.
inline SwitchingSchedule builtin_switching_schedule() {
  auto bidir = [](std::initializer_list<std::pair<int, int>> edges) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(5, 5);
    for (const auto& [u, v] : edges) {
      a(u, v) = 1.0;
      a(v, u) = 1.0;
    }
    return Digraph(std::move(a));
  };
  std::vector<Digraph> graphs;
  graphs.push_back(bidir({{0, 1}, {1, 2}}));
  graphs.push_back(bidir({{2, 3}, {3, 4}, {4, 0}}));
  return SwitchingSchedule(std::move(graphs), {{0, 0.2}, {1, 0.2}});
}

inline std::vector<Eigen::VectorXd> builtin_initial_states() {
  using detail::vec2;
  return {vec2(0.0, 5.0), vec2(3.0, -2.0), vec2(2.0, 3.0), vec2(5.0, 1.0), vec2(2.0, -3.0)};
}

/// The three bundled cases: 1 = continuous flow on the fixed digraph
/// (tau = 20), 2 = continuous flow under the switching topology (tau = 35),
/// 3 = discrete iteration on the fixed digraph (h = 0.25, harmonic gains).
inline Scenario builtin_scenario(int case_id) {
  using detail::vec2;
  if (case_id < 1 || case_id > 3) throw InvalidParams("bundled cases are numbered 1 to 3");

  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.record_every = 10;
  cfg.convergence_dwell = 100;

  AssertionConfig assertions;
  assertions.lyapunov = true;
  assertions.reference = vec2(2.58, 1.23);

  if (case_id == 1) {
    cfg.tau = 20.0;
    cfg.horizon = 10.0;
    return Scenario{builtin_problem(),        builtin_fixed_graph(),
                    Algorithm::DistributedContinuous, cfg,
                    builtin_initial_states(), assertions,
                    vec2(2.58, 1.23)};
  }
  if (case_id == 2) {
    cfg.tau = 35.0;
    cfg.horizon = 40.0;
    return Scenario{builtin_problem(),        builtin_switching_schedule(),
                    Algorithm::DistributedContinuous, cfg,
                    builtin_initial_states(), assertions,
                    vec2(2.61, 1.37)};
  }
  cfg.h = 0.25;
  cfg.horizon = 5000.0;
  cfg.record_every = 1;
  cfg.alpha = StepSchedule::harmonic(1.0, 0.02, ScheduleRole::Alpha);
  cfg.beta = StepSchedule::harmonic(1.0, 0.02, ScheduleRole::Beta);
  cfg.numeric.convergence_tol = 1e-4;
  return Scenario{builtin_problem(),        builtin_fixed_graph(),
                  Algorithm::DistributedDiscrete, cfg,
                  builtin_initial_states(), assertions,
                  vec2(2.57, 1.54)};
}

}  // namespace cfp
