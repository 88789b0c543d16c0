#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <utility>
#include <vector>

#include "cfp/errors.hpp"
#include "cfp/numeric_config.hpp"

namespace cfp {

/// Weighted directed communication topology on n agents.
///
/// Entry (i, j) of the weight matrix is the weight agent i places on
/// information received from agent j, so a_ij > 0 means the edge j -> i
/// exists and information flows j -> i. Diagonal entries are discarded at
/// construction; all weights must be non-negative.
class Digraph {
 public:
  explicit Digraph(Eigen::MatrixXd weights) : weights_(std::move(weights)) {
    if (weights_.rows() == 0 || weights_.rows() != weights_.cols()) {
      throw InvalidParams("digraph weight matrix must be square and non-empty");
    }
    if ((weights_.array() < 0.0).any()) {
      throw InvalidParams("digraph weights must be non-negative");
    }
    weights_.diagonal().setZero();
  }

  /// Build from a list of (from, to, weight) edges, 0-based node ids.
  static Digraph from_edges(int n,
                            const std::vector<std::tuple<int, int, double>>& edges) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [from, to, w] : edges) {
      if (from < 0 || from >= n || to < 0 || to >= n) {
        throw InvalidParams("edge endpoint out of range");
      }
      a(to, from) = w;
    }
    return Digraph(std::move(a));
  }

  int size() const { return static_cast<int>(weights_.rows()); }
  const Eigen::MatrixXd& weights() const { return weights_; }

  /// True if agent `to` receives from agent `from`.
  bool has_edge(int from, int to) const { return weights_(to, from) > 0.0; }

 private:
  Eigen::MatrixXd weights_;
};

namespace detail {

/// Nodes reachable from `root` along information-flow edges j -> i
/// (or against them when `reverse` is set).
inline std::vector<char> reachable(const Eigen::MatrixXd& a, int root, bool reverse) {
  const int n = static_cast<int>(a.rows());
  std::vector<char> seen(n, 0);
  std::vector<int> stack{root};
  seen[root] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      const double w = reverse ? a(u, v) : a(v, u);
      if (w > 0.0 && !seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

inline bool all_reached(const std::vector<char>& seen) {
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

}  // namespace detail

/// Laplacian L of the digraph: l_ij = -a_ij for i != j, l_ii = sum_j a_ij.
/// Every row sums to zero by construction.
inline Eigen::MatrixXd laplacian(const Digraph& g) {
  Eigen::MatrixXd l = -g.weights();
  l.diagonal() = g.weights().rowwise().sum();
  return l;
}

/// True iff every node reaches every other along information-flow edges.
inline bool is_strongly_connected(const Digraph& g) {
  return detail::all_reached(detail::reachable(g.weights(), 0, false)) &&
         detail::all_reached(detail::reachable(g.weights(), 0, true));
}

/// True iff some root reaches all nodes along information-flow edges,
/// i.e. a subset of the edges forms a directed spanning tree.
inline bool has_spanning_tree(const Digraph& g) {
  for (int root = 0; root < g.size(); ++root) {
    if (detail::all_reached(detail::reachable(g.weights(), root, false))) {
      return true;
    }
  }
  return false;
}

/// True iff each node's in-weight sum equals its out-weight sum within tol.
inline bool is_balanced(const Digraph& g, double tol = NumericConfig{}.balance_tol) {
  const Eigen::VectorXd in = g.weights().rowwise().sum();
  const Eigen::VectorXd out = g.weights().colwise().sum().transpose();
  return ((in - out).cwiseAbs().array() <= tol).all();
}

/// Eigenvalues of the Laplacian, sorted by real part (then imaginary part)
/// ascending. For a graph with a spanning tree, exactly one is (numerically)
/// zero and the rest have positive real parts.
inline std::vector<std::complex<double>> laplacian_spectrum(const Digraph& g) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(laplacian(g), /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("Laplacian eigen-decomposition did not converge");
  }
  std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                       es.eigenvalues().data() + g.size());
  std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return ev;
}

/// Positive left null eigenvector w of the Laplacian: w^T L = 0, sum w = 1.
/// Exists for strongly connected digraphs; computed as the left eigenvector
/// for the eigenvalue nearest zero, sign-fixed and normalized.
inline Eigen::VectorXd left_null_eigenvector(const Digraph& g,
                                             const NumericConfig& cfg = {}) {
  if (!is_strongly_connected(g)) {
    throw NotStronglyConnected("left null eigenvector requires a strongly connected digraph");
  }
  const Eigen::MatrixXd l = laplacian(g);
  Eigen::EigenSolver<Eigen::MatrixXd> es(l.transpose());
  if (es.info() != Eigen::Success) {
    throw NumericalFailure("left eigenvector solve did not converge");
  }
  int k = 0;
  es.eigenvalues().cwiseAbs().minCoeff(&k);
  Eigen::VectorXcd v = es.eigenvectors().col(k);
  // Rotate the complex phase away before taking the real part.
  int m = 0;
  v.cwiseAbs().maxCoeff(&m);
  v *= std::conj(v(m)) / std::abs(v(m));
  Eigen::VectorXd w = v.real();
  if (w.sum() < 0.0) w = -w;
  w /= w.sum();
  const double residual = (w.transpose() * l).cwiseAbs().maxCoeff();
  if (!(residual <= cfg.null_residual_tol) || !(w.minCoeff() > 0.0)) {
    throw NumericalFailure("left null eigenvector residual " + std::to_string(residual) +
                           " exceeds tolerance or has non-positive entries");
  }
  return w;
}

/// Upper bound rho on the consensus gain of the discrete distributed
/// algorithm: rho = min(1 / max_i sum_j a_ij, min over nonzero Laplacian
/// eigenvalues of 2 Re(lambda) / |lambda|^2). For any h in (0, rho) all
/// nonzero modes satisfy |1 - h lambda| < 1.
inline double step_size_bound(const Digraph& g, const NumericConfig& cfg = {}) {
  if (!has_spanning_tree(g)) {
    throw NotConnected("step size bound requires a digraph with a spanning tree");
  }
  double spectral = std::numeric_limits<double>::infinity();
  int nonzero = 0;
  for (const auto& ev : laplacian_spectrum(g)) {
    if (std::abs(ev) <= cfg.spectral_tol) continue;
    ++nonzero;
    spectral = std::min(spectral, 2.0 * ev.real() / std::norm(ev));
  }
  if (nonzero == 0) {
    throw NotConnected("step size bound needs at least one nonzero eigenvalue");
  }
  const double max_row = g.weights().rowwise().sum().maxCoeff();
  return std::min(1.0 / max_row, spectral);
}

}  // namespace cfp
