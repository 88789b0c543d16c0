#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <optional>
#include <utility>
#include <variant>

#include "cfp/errors.hpp"

namespace cfp {

/// g(x) = a^T x - b. A zero `a` gives the constant function -b, used for
/// agents whose inequality is vacuous.
struct LinearFn {
  Eigen::VectorXd a;
  double b = 0.0;
};

/// g(x) = x^T Q x + c^T x + d with Q symmetric positive semidefinite.
struct QuadraticFn {
  Eigen::MatrixXd q;
  Eigen::VectorXd c;
  double d = 0.0;
};

/// Residual block A x - b feeding the penalty psi(y) = ||y+||^2; the scalar
/// function represented is g(x) = ||(A x - b)+||^2, which is zero exactly on
/// { x : A x <= b }.
struct LinearBlockFn {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
};

/// Componentwise positive part.
inline Eigen::VectorXd positive_part(const Eigen::VectorXd& y) {
  return y.cwiseMax(0.0);
}

/// Penalty psi(A, b; x) = ||(A x - b)+||^2 and its gradient 2 A^T (A x - b)+.
/// With `unscaled_direction` the vector half A^T (A x - b)+ is returned
/// instead, which is the direction the linear-inequality flow consumes.
inline std::pair<double, Eigen::VectorXd> psi_value_and_grad(
    const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& x,
    bool unscaled_direction = false) {
  if (a.rows() != b.size() || a.cols() != x.size()) {
    throw DimensionMismatch("psi: incompatible A, b, x dimensions");
  }
  const Eigen::VectorXd plus = positive_part(a * x - b);
  Eigen::VectorXd dir = a.transpose() * plus;
  if (!unscaled_direction) dir *= 2.0;
  return {plus.squaredNorm(), std::move(dir)};
}

/// A convex scalar function with a subgradient oracle for its plus function
/// g+ = max(g, 0). Construct through the factories; the quadratic factory
/// verifies positive semidefiniteness so convexity is guaranteed.
class ConvexInequality {
 public:
  using Fn = std::variant<LinearFn, QuadraticFn, LinearBlockFn>;

  static ConvexInequality linear(Eigen::VectorXd a, double b) {
    if (a.size() == 0) throw InvalidParams("linear inequality needs a non-empty coefficient vector");
    return ConvexInequality(LinearFn{std::move(a), b});
  }

  /// The constant function g(x) = value (value <= 0 makes it vacuous).
  static ConvexInequality constant(double value, Eigen::Index dim) {
    return ConvexInequality(LinearFn{Eigen::VectorXd::Zero(dim), -value});
  }

  static ConvexInequality quadratic(Eigen::MatrixXd q, Eigen::VectorXd c, double d,
                                    double psd_tol = 1e-10) {
    if (q.rows() != q.cols() || q.rows() != c.size()) {
      throw InvalidParams("quadratic inequality needs square Q matching c");
    }
    if (!q.isApprox(q.transpose(), 1e-12)) {
      throw InvalidParams("quadratic inequality needs symmetric Q");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalFailure("PSD check eigen-solve failed");
    if (es.eigenvalues().minCoeff() < -psd_tol) {
      throw InvalidParams("quadratic inequality needs positive semidefinite Q");
    }
    return ConvexInequality(QuadraticFn{std::move(q), std::move(c), d});
  }

  static ConvexInequality linear_block(Eigen::MatrixXd a, Eigen::VectorXd b) {
    if (a.rows() != b.size() || a.rows() == 0) {
      throw InvalidParams("linear block needs A with one row per entry of b");
    }
    return ConvexInequality(LinearBlockFn{std::move(a), std::move(b)});
  }

  const Fn& fn() const { return fn_; }
  bool is_linear_block() const { return std::holds_alternative<LinearBlockFn>(fn_); }

  Eigen::Index dimension() const {
    return std::visit(
        [](const auto& f) -> Eigen::Index {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, LinearFn>) return f.a.size();
          else if constexpr (std::is_same_v<T, QuadraticFn>) return f.c.size();
          else return f.a.cols();
        },
        fn_);
  }

  /// Optional bound K on ||grad g+||, when known.
  std::optional<double> subgradient_bound;

 private:
  explicit ConvexInequality(Fn fn) : fn_(std::move(fn)) {}
  Fn fn_;
};

namespace detail {
inline void check_dimension(const ConvexInequality& g, const Eigen::VectorXd& x) {
  if (g.dimension() != x.size()) {
    throw DimensionMismatch("point dimension does not match inequality dimension");
  }
}
}  // namespace detail

inline double value(const ConvexInequality& g, const Eigen::VectorXd& x) {
  detail::check_dimension(g, x);
  return std::visit(
      [&x](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearFn>) {
          return f.a.dot(x) - f.b;
        } else if constexpr (std::is_same_v<T, QuadraticFn>) {
          return x.dot(f.q * x) + f.c.dot(x) + f.d;
        } else {
          return positive_part(f.a * x - f.b).squaredNorm();
        }
      },
      g.fn());
}

/// g+(x) = max(g(x), 0).
inline double plus_value(const ConvexInequality& g, const Eigen::VectorXd& x) {
  return std::max(value(g, x), 0.0);
}

/// Subgradient of the plus function: zero when g(x) <= 0 (also exactly at
/// the kink), otherwise the gradient of g.
inline Eigen::VectorXd subgradient_plus(const ConvexInequality& g, const Eigen::VectorXd& x) {
  detail::check_dimension(g, x);
  if (value(g, x) <= 0.0) return Eigen::VectorXd::Zero(x.size());
  return std::visit(
      [&x](const auto& f) -> Eigen::VectorXd {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LinearFn>) {
          return f.a;
        } else if constexpr (std::is_same_v<T, QuadraticFn>) {
          return 2.0 * (f.q * x) + f.c;
        } else {
          return 2.0 * (f.a.transpose() * positive_part(f.a * x - f.b));
        }
      },
      g.fn());
}

}  // namespace cfp
