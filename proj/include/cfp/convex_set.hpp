#pragma once

#include <Eigen/Dense>

#include <string>
#include <variant>

#include "cfp/errors.hpp"

namespace cfp {

/// Axis-aligned box { x : lower <= x <= upper } (componentwise).
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

/// Halfspace { x : a^T x <= b }.
struct Halfspace {
  Eigen::VectorXd a;
  double b = 0.0;
};

/// Closed Euclidean ball of positive radius.
struct Ball {
  Eigen::VectorXd center;
  double radius = 1.0;
};

/// Hyperplane { x : a^T x = b }. Also serves as the affine solution set of
/// a scalar linear equation, whose projection has the same closed form.
struct Hyperplane {
  Eigen::VectorXd a;
  double b = 0.0;
};

/// The whole ambient space; projection is the identity.
struct WholeSpace {};

/// A closed convex set with a cheap exact projection.
using ConvexSet = std::variant<Box, Halfspace, Ball, Hyperplane, WholeSpace>;

/// Throws InvalidParams when the shape invariants are violated
/// (box bounds out of order, zero normal, non-positive radius).
inline void validate(const ConvexSet& set) {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          if (s.lower.size() != s.upper.size() || s.lower.size() == 0) {
            throw InvalidParams("box bounds must be non-empty and of equal dimension");
          }
          if ((s.lower.array() > s.upper.array()).any()) {
            throw InvalidParams("box lower bound exceeds upper bound");
          }
        } else if constexpr (std::is_same_v<T, Halfspace> || std::is_same_v<T, Hyperplane>) {
          if (s.a.size() == 0 || s.a.norm() == 0.0) {
            throw InvalidParams("halfspace/hyperplane normal must be nonzero");
          }
        } else if constexpr (std::is_same_v<T, Ball>) {
          if (s.center.size() == 0) throw InvalidParams("ball center must be non-empty");
          if (!(s.radius > 0.0)) throw InvalidParams("ball radius must be positive");
        }
      },
      set);
}

/// Ambient dimension of the set, or -1 when any dimension is admissible.
inline Eigen::Index dimension_of(const ConvexSet& set) {
  return std::visit(
      [](const auto& s) -> Eigen::Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) return s.lower.size();
        else if constexpr (std::is_same_v<T, Ball>) return s.center.size();
        else if constexpr (std::is_same_v<T, WholeSpace>) return -1;
        else return s.a.size();
      },
      set);
}

namespace detail {
inline void check_dimension(const ConvexSet& set, const Eigen::VectorXd& x) {
  const Eigen::Index d = dimension_of(set);
  if (d >= 0 && d != x.size()) {
    throw DimensionMismatch("point dimension " + std::to_string(x.size()) +
                            " does not match set dimension " + std::to_string(d));
  }
}
}  // namespace detail

/// Nearest point of the set: unique, idempotent, non-expansive.
inline Eigen::VectorXd project(const ConvexSet& set, const Eigen::VectorXd& x) {
  detail::check_dimension(set, x);
  return std::visit(
      [&x](const auto& s) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Box>) {
          return x.cwiseMax(s.lower).cwiseMin(s.upper);
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          const double violation = s.a.dot(x) - s.b;
          if (violation <= 0.0) return x;
          return x - (violation / s.a.squaredNorm()) * s.a;
        } else if constexpr (std::is_same_v<T, Ball>) {
          const Eigen::VectorXd r = x - s.center;
          const double d = r.norm();
          if (d <= s.radius) return x;
          return s.center + (s.radius / d) * r;
        } else if constexpr (std::is_same_v<T, Hyperplane>) {
          return x - ((s.a.dot(x) - s.b) / s.a.squaredNorm()) * s.a;
        } else {
          return x;
        }
      },
      set);
}

/// Euclidean distance of x from the set, ||x - P(x)||.
inline double distance(const ConvexSet& set, const Eigen::VectorXd& x) {
  return (x - project(set, x)).norm();
}

inline bool contains(const ConvexSet& set, const Eigen::VectorXd& x, double tol = 0.0) {
  return distance(set, x) <= tol;
}

}  // namespace cfp
