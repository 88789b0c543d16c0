#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "cfp/errors.hpp"
#include "cfp/problem.hpp"

namespace cfp {

/// Largest pairwise distance max_{i,j} ||x_i - x_j||.
inline double consensus_error(const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) throw InvalidParams("consensus error needs at least one agent");
  double worst = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      worst = std::max(worst, (states[i] - states[j]).norm());
    }
  }
  return worst;
}

struct FeasibilityResiduals {
  double max_set_residual = 0.0;         ///< max_i distance(X_i, x)
  double max_inequality_residual = 0.0;  ///< max_i g_i+(x)
};

/// How far a single candidate point is from satisfying every agent's
/// constraints.
inline FeasibilityResiduals feasibility_residuals(const ProblemSpec& spec,
                                                  const Eigen::VectorXd& x) {
  if (x.size() != spec.dim) throw DimensionMismatch("candidate point dimension mismatch");
  FeasibilityResiduals r;
  for (const auto& agent : spec.agents) {
    r.max_set_residual = std::max(r.max_set_residual, distance(agent.set, x));
    r.max_inequality_residual =
        std::max(r.max_inequality_residual, plus_value(agent.inequality, x));
  }
  return r;
}

/// Mean of the agent states, the collective solution estimate.
inline Eigen::VectorXd mean_state(const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) throw InvalidParams("mean state needs at least one agent");
  Eigen::VectorXd m = Eigen::VectorXd::Zero(states.front().size());
  for (const auto& x : states) m += x;
  return m / static_cast<double>(states.size());
}

}  // namespace cfp
