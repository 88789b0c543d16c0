#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "cfp/errors.hpp"
#include "cfp/graph.hpp"
#include "cfp/numeric_config.hpp"

namespace cfp {

struct ScheduleSegment {
  std::size_t graph;  ///< index into the graph list
  double duration;    ///< seconds, > 0
};

/// Piecewise-constant periodic map t -> Digraph. The segment list is
/// repeated forever, so the topology is defined for all t >= 0.
class SwitchingSchedule {
 public:
  SwitchingSchedule(std::vector<Digraph> graphs, std::vector<ScheduleSegment> segments)
      : graphs_(std::move(graphs)), segments_(std::move(segments)) {
    if (graphs_.empty() || segments_.empty()) {
      throw InvalidParams("switching schedule needs at least one graph and one segment");
    }
    const int n = graphs_.front().size();
    for (const auto& g : graphs_) {
      if (g.size() != n) throw InvalidParams("all graphs in a schedule must share the node count");
    }
    boundaries_.reserve(segments_.size() + 1);
    boundaries_.push_back(0.0);
    for (const auto& seg : segments_) {
      if (seg.graph >= graphs_.size()) throw InvalidParams("segment references an unknown graph");
      if (!(seg.duration > 0.0)) throw InvalidParams("segment durations must be positive");
      boundaries_.push_back(boundaries_.back() + seg.duration);
    }
  }

  int size() const { return graphs_.front().size(); }
  double period() const { return boundaries_.back(); }
  const std::vector<Digraph>& graphs() const { return graphs_; }
  const std::vector<ScheduleSegment>& segments() const { return segments_; }

  /// Segment boundaries 0 = b_0 < b_1 < ... < b_k = period.
  const std::vector<double>& boundaries() const { return boundaries_; }

  /// Index of the segment active at time t >= 0 (right-continuous).
  std::size_t segment_index_at(double t) const {
    double r = std::fmod(t, period());
    if (r < 0.0) r += period();
    // upper_bound lands on the first boundary strictly greater than r
    const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), r);
    const std::size_t idx = static_cast<std::size_t>(it - boundaries_.begin());
    return std::min(idx == 0 ? 0 : idx - 1, segments_.size() - 1);
  }

  const Digraph& graph_at(double t) const {
    return graphs_[segments_[segment_index_at(t)].graph];
  }

 private:
  std::vector<Digraph> graphs_;
  std::vector<ScheduleSegment> segments_;
  std::vector<double> boundaries_;
};

/// Window length T and integral threshold delta defining delta-edges.
struct DeltaGraphParams {
  double window;  ///< T > 0, seconds
  double delta;   ///< integral threshold > 0
};

namespace detail {

/// Cumulative integral over [0, x] of one edge weight under a periodic
/// piecewise-constant schedule. `seg_weight[k]` is the weight during
/// segment k; `bounds` are the schedule's segment boundaries.
class EdgeIntegral {
 public:
  EdgeIntegral(const std::vector<double>& bounds, std::vector<double> seg_weight)
      : bounds_(bounds), weight_(std::move(seg_weight)) {
    cum_.resize(bounds_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < bounds_.size(); ++k) {
      cum_[k + 1] = cum_[k] + weight_[k] * (bounds_[k + 1] - bounds_[k]);
    }
  }

  double operator()(double x) const {
    const double period = bounds_.back();
    double k = std::floor(x / period);
    double r = x - k * period;
    if (r < 0.0) { r += period; k -= 1.0; }
    if (r > period) { r -= period; k += 1.0; }
    const auto it = std::upper_bound(bounds_.begin(), bounds_.end(), r);
    std::size_t seg = static_cast<std::size_t>(it - bounds_.begin());
    seg = std::min(seg == 0 ? 0 : seg - 1, weight_.size() - 1);
    return k * cum_.back() + cum_[seg] + weight_[seg] * (r - bounds_[seg]);
  }

 private:
  const std::vector<double>& bounds_;
  std::vector<double> weight_;
  std::vector<double> cum_;
};

}  // namespace detail

/// Induced delta-graph of a switching schedule: the 0/1-weighted digraph
/// whose edge (j, i) is present iff the weight integral over every sliding
/// window [t, t+T] is at least delta.
///
/// For a piecewise-constant periodic schedule the window integral is a
/// periodic piecewise-linear function of the offset t, so its minimum is
/// attained where t or t+T hits a segment boundary; those breakpoints are
/// evaluated exactly instead of grid-sampling.
inline Digraph delta_graph(const SwitchingSchedule& s, const DeltaGraphParams& p,
                           const NumericConfig& cfg = {}) {
  if (!(p.window > 0.0) || !(p.delta > 0.0)) {
    throw InvalidParams("delta-graph parameters must be positive");
  }
  const int n = s.size();
  const double period = s.period();
  const auto& bounds = s.boundaries();

  std::vector<double> offsets;
  offsets.reserve(2 * bounds.size());
  for (double b : bounds) {
    offsets.push_back(b);
    double u = std::fmod(b - p.window, period);
    if (u < 0.0) u += period;
    offsets.push_back(u);
  }

  Eigen::MatrixXd edges = Eigen::MatrixXd::Zero(n, n);
  std::vector<double> seg_weight(s.segments().size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < s.segments().size(); ++k) {
        seg_weight[k] = s.graphs()[s.segments()[k].graph].weights()(i, j);
      }
      const detail::EdgeIntegral integral(bounds, seg_weight);
      double worst = std::numeric_limits<double>::infinity();
      for (double u : offsets) {
        worst = std::min(worst, integral(u + p.window) - integral(u));
      }
      if (worst >= p.delta - cfg.integral_tol) edges(i, j) = 1.0;
    }
  }
  return Digraph(std::move(edges));
}

/// Geometric consensus rate gamma in (0, 1) for balanced switching graphs
/// whose delta-graph is strongly connected:
///
///   gamma = (1 - 1/(8 n^2)^floor(n/2)) ^ (1 / ((floor(1/delta)+1) * floor(n/2) * T))
inline double contraction_rate(int n, double delta, double T) {
  if (n < 2) throw InvalidParams("contraction rate needs at least two agents");
  if (!(delta > 0.0) || !(T > 0.0)) throw InvalidParams("delta and T must be positive");
  const double half = std::floor(static_cast<double>(n) / 2.0);
  const double p = std::pow(8.0 * n * n, -half);
  const double exponent = 1.0 / ((std::floor(1.0 / delta) + 1.0) * half * T);
  const double gamma = std::exp(std::log1p(-p) * exponent);
  // For very large n the base rounds to 1; return the closest double below 1.
  return gamma < 1.0 ? gamma : std::nextafter(1.0, 0.0);
}

}  // namespace cfp
