#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "cfp/convex_set.hpp"
#include "cfp/graph.hpp"

namespace cfp::testing {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

inline Eigen::MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows.begin()->size());
  Eigen::MatrixXd m(r, c);
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

/// Random strongly connected digraph: a directed ring through a random
/// permutation plus extra random edges. Weights are dyadic (multiples of
/// 1/8) so Laplacian row sums cancel exactly in double arithmetic.
inline Digraph random_strongly_connected(std::mt19937& rng, int n, double extra_edge_prob = 0.3) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::uniform_int_distribution<int> wgt(1, 16);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    a(perm[(i + 1) % n], perm[i]) = wgt(rng) / 8.0;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && coin(rng) < extra_edge_prob) a(i, j) = wgt(rng) / 8.0;
    }
  }
  return Digraph(std::move(a));
}

/// Enumeration oracle for 2-d projections, independent of the closed-form
/// projection formulas. Feasible points project to themselves (checked via
/// the raw set inequalities); exterior points project onto the boundary,
/// which is enumerated on a fixed pitch: the box as a dense grid, halfspace
/// and hyperplane boundaries as lines, the sphere by arc length.
inline Eigen::VectorXd grid_project(const ConvexSet& set, const Eigen::VectorXd& x,
                                    double pitch) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd arg = x;
  auto consider = [&](const Eigen::VectorXd& p) {
    const double d = (p - x).norm();
    if (d < best) {
      best = d;
      arg = p;
    }
  };
  auto line_scan = [&](const Eigen::VectorXd& a, double b) {
    Eigen::VectorXd origin = b / a.squaredNorm() * a;  // one point of a^T p = b
    Eigen::VectorXd tangent(2);
    tangent << -a(1), a(0);
    tangent.normalize();
    const double reach = (x - origin).norm() + pitch;
    for (double s = -reach; s <= reach; s += pitch) consider(origin + s * tangent);
  };
  if (const auto* box = std::get_if<Box>(&set)) {
    for (double u = box->lower(0); u <= box->upper(0) + pitch / 2; u += pitch) {
      for (double v = box->lower(1); v <= box->upper(1) + pitch / 2; v += pitch) {
        Eigen::VectorXd p(2);
        p << std::min(u, box->upper(0)), std::min(v, box->upper(1));
        consider(p);
      }
    }
  } else if (const auto* hs = std::get_if<Halfspace>(&set)) {
    if (hs->a.dot(x) <= hs->b) return x;
    line_scan(hs->a, hs->b);
  } else if (const auto* ball = std::get_if<Ball>(&set)) {
    if ((x - ball->center).norm() <= ball->radius) return x;
    const double dtheta = pitch / ball->radius;
    for (double theta = 0.0; theta < 2 * std::numbers::pi; theta += dtheta) {
      Eigen::VectorXd p(2);
      p << ball->center(0) + ball->radius * std::cos(theta),
          ball->center(1) + ball->radius * std::sin(theta);
      consider(p);
    }
  } else if (const auto* hp = std::get_if<Hyperplane>(&set)) {
    line_scan(hp->a, hp->b);
  }
  return arg;
}

}  // namespace cfp::testing
