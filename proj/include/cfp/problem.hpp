#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "cfp/convex_set.hpp"
#include "cfp/errors.hpp"
#include "cfp/inequality.hpp"

namespace cfp {

/// One agent's share of the feasibility problem: a convex inequality
/// g_i(x) <= 0 and a closed convex set X_i. An agent holding only one of
/// the two gets a vacuous counterpart (constant -1 inequality, whole space).
struct AgentConstraint {
  ConvexInequality inequality;
  ConvexSet set;
};

/// The convex feasibility problem: find x with g_i(x) <= 0 for all i and
/// x in the intersection of the X_i.
struct ProblemSpec {
  Eigen::Index dim = 0;
  std::vector<AgentConstraint> agents;
  /// Optional common bound K on all ||grad g_i+||.
  std::optional<double> subgradient_bound;

  int agent_count() const { return static_cast<int>(agents.size()); }

  void validate() const {
    if (dim <= 0) throw InvalidParams("problem dimension must be positive");
    if (agents.empty()) throw InvalidParams("problem needs at least one agent");
    for (std::size_t i = 0; i < agents.size(); ++i) {
      const auto tag = " (agent " + std::to_string(i + 1) + ")";
      if (agents[i].inequality.dimension() != dim) {
        throw DimensionMismatch("inequality dimension does not match problem" + tag);
      }
      const Eigen::Index sd = dimension_of(agents[i].set);
      if (sd >= 0 && sd != dim) {
        throw DimensionMismatch("set dimension does not match problem" + tag);
      }
      cfp::validate(agents[i].set);
    }
  }
};

}  // namespace cfp
