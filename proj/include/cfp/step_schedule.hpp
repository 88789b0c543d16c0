#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cfp/errors.hpp"

namespace cfp {

struct ConstantSchedule {
  double value = 1.0;
};

/// value(t) = c0 / (c1 * t + 1)
struct HarmonicSchedule {
  double c0 = 1.0;
  double c1 = 0.0;
};

/// Samples indexed by iteration (continuous callers index by floor(t));
/// past the end the last sample repeats.
struct CustomSchedule {
  std::vector<double> samples;
};

enum class ScheduleRole { Alpha, Beta };

/// Time-indexed gain alpha(t) or beta(t) for the projection / subgradient
/// terms. Values are non-negative for all t >= 0 by construction.
struct StepSchedule {
  std::variant<ConstantSchedule, HarmonicSchedule, CustomSchedule> kind;
  ScheduleRole role = ScheduleRole::Alpha;

  static StepSchedule constant(double value, ScheduleRole role = ScheduleRole::Alpha) {
    if (!(value >= 0.0)) throw InvalidParams("schedule values must be non-negative");
    return {ConstantSchedule{value}, role};
  }

  static StepSchedule harmonic(double c0, double c1, ScheduleRole role = ScheduleRole::Alpha) {
    if (!(c0 >= 0.0) || !(c1 >= 0.0)) {
      throw InvalidParams("harmonic schedule coefficients must be non-negative");
    }
    return {HarmonicSchedule{c0, c1}, role};
  }

  static StepSchedule custom(std::vector<double> samples, ScheduleRole role = ScheduleRole::Alpha) {
    if (samples.empty()) throw InvalidParams("custom schedule needs at least one sample");
    for (double v : samples) {
      if (!(v >= 0.0)) throw InvalidParams("schedule values must be non-negative");
    }
    return {CustomSchedule{std::move(samples)}, role};
  }

  double at(double t) const {
    return std::visit(
        [t](const auto& s) -> double {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ConstantSchedule>) {
            return s.value;
          } else if constexpr (std::is_same_v<T, HarmonicSchedule>) {
            return s.c0 / (s.c1 * t + 1.0);
          } else {
            const auto idx = static_cast<std::size_t>(std::max(0.0, std::floor(t)));
            return s.samples[std::min(idx, s.samples.size() - 1)];
          }
        },
        kind);
  }
};

/// The convergence regime a schedule is validated against.
enum class ConvergenceCondition {
  CentralizedContinuous,           ///< nonneg gains with divergent integrals
  CentralizedDiscrete,             ///< alpha in [0,1], sum = inf, sum of squares < inf
  DistributedContinuousFixed,      ///< constant gain tau, no schedule conditions
  DistributedContinuousSwitching,  ///< constant gain tau, no schedule conditions
  DistributedDiscrete,             ///< same schedule conditions as the centralized discrete case
};

struct ScheduleValidity {
  enum class Status { Valid, Invalid, Unknown };
  Status status = Status::Unknown;
  /// True iff the parametric family provably satisfies the cited conditions.
  bool theorem_valid = false;
  std::vector<std::string> reasons;
  /// Partial-sum diagnostics for custom schedules over their sample horizon.
  double partial_sum = 0.0;
  double partial_sum_sq = 0.0;
};

/// Checks whether a schedule provably satisfies the step-size conditions of
/// the selected convergence regime. Parametric families get a definite
/// answer; custom sample lists are reported unknown with partial sums.
inline ScheduleValidity validate_schedule(const StepSchedule& s, ConvergenceCondition cond) {
  ScheduleValidity report;
  auto fail = [&report](const std::string& why) {
    report.status = ScheduleValidity::Status::Invalid;
    report.reasons.push_back(why);
  };

  const bool discrete = cond == ConvergenceCondition::CentralizedDiscrete ||
                        cond == ConvergenceCondition::DistributedDiscrete;
  const bool continuous_centralized = cond == ConvergenceCondition::CentralizedContinuous;
  if (!discrete && !continuous_centralized) {
    report.status = ScheduleValidity::Status::Valid;
    report.theorem_valid = true;
    report.reasons.push_back("distributed continuous algorithms use a constant gain; no schedule conditions apply");
    return report;
  }

  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, ConstantSchedule>) {
          if (!(k.value > 0.0)) {
            fail("constant 0 has a vanishing (integral) sum");
          } else if (discrete) {
            if (s.role == ScheduleRole::Alpha && k.value > 1.0) {
              fail("alpha(t) must stay in [0, 1]");
            }
            fail("a positive constant has a divergent sum of squares");
          } else {
            report.status = ScheduleValidity::Status::Valid;
          }
        } else if constexpr (std::is_same_v<T, HarmonicSchedule>) {
          if (!(k.c0 > 0.0)) {
            fail("c0 = 0 gives the zero schedule; the (integral) sum vanishes");
          } else if (discrete) {
            if (!(k.c1 > 0.0)) fail("c1 = 0 reduces to a constant; sum of squares diverges");
            if (s.role == ScheduleRole::Alpha && k.c0 > 1.0) fail("alpha(0) = c0 exceeds 1");
            if (report.reasons.empty()) report.status = ScheduleValidity::Status::Valid;
          } else {
            report.status = ScheduleValidity::Status::Valid;
          }
        } else {
          // Custom samples: only finite diagnostics are possible.
          report.status = ScheduleValidity::Status::Unknown;
          for (double v : k.samples) {
            report.partial_sum += v;
            report.partial_sum_sq += v * v;
            if (discrete && s.role == ScheduleRole::Alpha && v > 1.0) {
              fail("a sample exceeds 1, violating alpha(t) in [0, 1]");
            }
          }
          if (report.status == ScheduleValidity::Status::Unknown) {
            report.reasons.push_back("custom schedules cannot be certified from finitely many samples");
          }
        }
      },
      s.kind);

  report.theorem_valid = report.status == ScheduleValidity::Status::Valid;
  return report;
}

}  // namespace cfp
