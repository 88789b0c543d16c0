#pragma once

#include "cfp/numeric_config.hpp"
#include "cfp/step_schedule.hpp"

namespace cfp {

/// Knobs shared by all five solver iterations. Continuous algorithms read
/// tau/dt and interpret `horizon` as simulated seconds; discrete algorithms
/// read h/alpha/beta and interpret `horizon` as an iteration count.
struct SolverConfig {
  double tau = 1.0;      ///< coupling gain of the continuous distributed flows, > 0
  double h = 0.1;        ///< consensus gain of the discrete distributed iteration
  double dt = 1e-3;      ///< explicit Euler step for the continuous flows
  double horizon = 10.0;
  int record_every = 1;  ///< trajectory subsampling stride, in steps
  StepSchedule alpha = StepSchedule::constant(1.0, ScheduleRole::Alpha);
  StepSchedule beta = StepSchedule::constant(1.0, ScheduleRole::Beta);
  /// Permit h outside (0, step_size_bound) to probe divergence.
  bool allow_step_size_override = false;
  /// Consecutive recorded points below tolerance required to declare
  /// convergence.
  int convergence_dwell = 100;
  NumericConfig numeric;

  void validate() const {
    if (!(tau > 0.0)) throw InvalidParams("tau must be positive");
    if (!(dt > 0.0)) throw InvalidParams("dt must be positive");
    if (record_every < 1) throw InvalidParams("record_every must be at least 1");
    if (convergence_dwell < 1) throw InvalidParams("convergence dwell must be at least 1");
  }
};

}  // namespace cfp
