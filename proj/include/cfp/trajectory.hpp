#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace cfp {

struct MetricSample {
  double consensus_error = 0.0;
  double max_set_residual = 0.0;
  double max_inequality_residual = 0.0;
  double lyapunov = 0.0;
};

/// Subsampled record of a run: one entry of `states` and `metrics` per
/// recorded time stamp.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<Eigen::VectorXd>> states;  ///< per time, per agent
  std::vector<MetricSample> metrics;

  std::size_t samples() const { return times.size(); }
  bool empty() const { return times.empty(); }
};

struct RunReport {
  bool converged = false;
  Eigen::VectorXd final_point;  ///< mean of the final agent states
  MetricSample final_metrics;
  long steps = 0;
  double wall_time_s = 0.0;
  std::vector<std::string> assertion_violations;
  /// Discrete distributed runs report the consensus gain bound they checked.
  std::optional<double> step_size_bound;
  /// Largest observed per-step excess of the enabled decay check.
  double max_lyapunov_excess = 0.0;
  std::string stop_reason;
};

}  // namespace cfp
