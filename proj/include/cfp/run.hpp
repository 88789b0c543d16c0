#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "cfp/algorithms.hpp"
#include "cfp/errors.hpp"
#include "cfp/metrics.hpp"
#include "cfp/scenario.hpp"
#include "cfp/trajectory.hpp"

namespace cfp {

struct RunResult {
  Trajectory trajectory;
  RunReport report;
};

namespace detail {

/// Weights of the weighted Lyapunov function: the Laplacian's left null
/// eigenvector on strongly connected fixed graphs, uniform otherwise.
inline Eigen::VectorXd lyapunov_weights(const Scenario& sc) {
  const int n = sc.problem.agent_count();
  if (const auto* g = std::get_if<Digraph>(&sc.topology); g && n > 1 && is_strongly_connected(*g)) {
    return left_null_eigenvector(*g, sc.config.numeric);
  }
  return Eigen::VectorXd::Constant(n, 1.0 / n);
}

inline double weighted_square_sum(const std::vector<Eigen::VectorXd>& states,
                                  const Eigen::VectorXd& ref, const Eigen::VectorXd& w) {
  double v = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    v += w(static_cast<Eigen::Index>(i)) * (states[i] - ref).squaredNorm();
  }
  return v;
}

/// V(t): the discrete algorithms use sum w_i ||x_i - ref||^2, the
/// continuous flows half of it.
inline double lyapunov_value(const std::vector<Eigen::VectorXd>& states,
                             const Eigen::VectorXd& ref, const Eigen::VectorXd& w,
                             bool discrete) {
  const double s = weighted_square_sum(states, ref, w);
  return discrete ? s : 0.5 * s;
}

}  // namespace detail

/// Executes the scenario's algorithm to horizon or convergence, recording a
/// subsampled trajectory and evaluating the enabled runtime checks every
/// step. Convergence means consensus error and both feasibility residuals
/// stay below tolerance for `convergence_dwell` consecutive recorded points.
inline RunResult run(const Scenario& sc) {
  sc.validate();
  const auto clock_start = std::chrono::steady_clock::now();
  const SolverConfig& cfg = sc.config;
  const bool discrete = is_discrete(sc.algorithm);

  RunResult out;
  RunReport& rep = out.report;
  Trajectory& traj = out.trajectory;

  std::vector<Eigen::VectorXd> states = sc.initial_states;
  const Eigen::VectorXd w = detail::lyapunov_weights(sc);
  const bool check = sc.assertions.lyapunov && sc.assertions.reference.has_value();
  const Eigen::VectorXd ref =
      check ? *sc.assertions.reference : Eigen::VectorXd::Zero(sc.problem.dim);

  auto finish = [&](long steps, const std::string& reason, bool converged) {
    rep.steps = steps;
    rep.converged = converged;
    rep.stop_reason = reason;
    rep.final_point = mean_state(states);
    const Eigen::VectorXd lref = sc.assertions.reference.value_or(rep.final_point);
    for (std::size_t s = 0; s < traj.samples(); ++s) {
      traj.metrics[s].lyapunov = detail::lyapunov_value(traj.states[s], lref, w, discrete);
    }
    if (!traj.metrics.empty()) {
      rep.final_metrics = traj.metrics.back();
    } else {
      const auto r = feasibility_residuals(sc.problem, rep.final_point);
      rep.final_metrics = {consensus_error(states), r.max_set_residual,
                           r.max_inequality_residual,
                           detail::lyapunov_value(states, lref, w, discrete)};
    }
    rep.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
  };

  int dwell = 0;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.states.push_back(states);
    MetricSample m;
    m.consensus_error = consensus_error(states);
    const auto r = feasibility_residuals(sc.problem, mean_state(states));
    m.max_set_residual = r.max_set_residual;
    m.max_inequality_residual = r.max_inequality_residual;
    traj.metrics.push_back(m);
    const double tol = cfg.numeric.convergence_tol;
    if (m.consensus_error <= tol && m.max_set_residual <= tol &&
        m.max_inequality_residual <= tol) {
      ++dwell;
    } else {
      dwell = 0;
    }
  };

  auto flag_violation = [&](long k, const char* what, double excess, double allowed) {
    std::ostringstream msg;
    msg << "step " << k << ": " << what << " excess " << excess << " > allowed " << allowed;
    rep.assertion_violations.push_back(msg.str());
    rep.max_lyapunov_excess = std::max(rep.max_lyapunov_excess, excess);
    if (sc.assertions.abort_on_violation) throw AssertionFailure(msg.str());
  };
  auto note_excess = [&](double excess) {
    rep.max_lyapunov_excess = std::max(rep.max_lyapunov_excess, std::max(excess, 0.0));
  };

  // ---- discrete algorithms -------------------------------------------------
  if (discrete) {
    const long total_steps = std::lround(cfg.horizon);
    SolverConfig loop_cfg = cfg;
    if (sc.algorithm == Algorithm::DistributedDiscrete) {
      const auto& g = std::get<Digraph>(sc.topology);
      if (!(cfg.h > 0.0)) throw StepSizeViolation("consensus gain h must be positive");
      if (!cfg.allow_step_size_override) {
        const double rho = step_size_bound(g, cfg.numeric);
        rep.step_size_bound = rho;
        if (!(cfg.h < rho)) {
          throw StepSizeViolation("h = " + std::to_string(cfg.h) +
                                  " is not below the bound " + std::to_string(rho));
        }
        // validated once here; skip the spectral check inside the hot loop
        loop_cfg.allow_step_size_override = true;
      }
    }
    if (total_steps <= 0) {
      finish(0, "empty horizon", false);
      return out;
    }

    record(0.0);
    bool converged = dwell >= cfg.convergence_dwell;
    long k = 0;
    while (!converged && k < total_steps) {
      const double v0 = check ? detail::weighted_square_sum(states, ref, w) : 0.0;
      if (sc.algorithm == Algorithm::CentralizedDiscrete) {
        const double beta_t = cfg.beta.at(static_cast<double>(k));
        states[0] = centralized_discrete_step(states[0], k, sc.problem.agents[0], loop_cfg);
        if (check) {
          const auto bound_k = sc.problem.agents[0].inequality.subgradient_bound
                                   ? sc.problem.agents[0].inequality.subgradient_bound
                                   : sc.problem.subgradient_bound;
          if (bound_k) {
            // dV <= beta(t)^2 K^2 with K bounding the plus-subgradient norm
            const double allowed = beta_t * beta_t * (*bound_k) * (*bound_k);
            const double excess =
                detail::weighted_square_sum(states, ref, w) - v0 - allowed;
            note_excess(excess);
            if (excess > sc.assertions.discrete_tol) {
              flag_violation(k, "centralized discrete decay", excess, sc.assertions.discrete_tol);
            }
          }
        }
      } else {
        DiscreteStepDetail det;
        auto next = distributed_discrete_step(states, k, std::get<Digraph>(sc.topology),
                                              sc.problem, loop_cfg, check ? &det : nullptr);
        if (check) {
          const double beta_t = cfg.beta.at(static_cast<double>(k));
          double bound = 0.0;
          for (int i = 0; i < sc.problem.agent_count(); ++i) {
            bound += -beta_t * w(i) * plus_value(sc.problem.agents[i].inequality, det.mixed[i]) +
                     w(i) * det.subgrad_terms[i].squaredNorm();
          }
          const double excess = detail::weighted_square_sum(next, ref, w) - v0 - bound;
          note_excess(excess);
          if (excess > sc.assertions.discrete_tol) {
            flag_violation(k, "distributed discrete decay", excess, sc.assertions.discrete_tol);
          }
        }
        states = std::move(next);
      }
      ++k;
      if (k % cfg.record_every == 0 || k == total_steps) {
        record(static_cast<double>(k));
        converged = dwell >= cfg.convergence_dwell;
      }
    }
    if (traj.times.back() != static_cast<double>(k)) record(static_cast<double>(k));
    finish(k, converged ? "converged" : "horizon reached", converged);
    return out;
  }

  // ---- continuous flows ----------------------------------------------------
  if (!(cfg.horizon > 0.0)) {
    finish(0, "empty horizon", false);
    return out;
  }
  const auto* schedule = std::get_if<SwitchingSchedule>(&sc.topology);
  const auto* fixed = std::get_if<Digraph>(&sc.topology);
  const double eps_time = cfg.dt * 1e-9;
  if (schedule) {
    for (const auto& seg : schedule->segments()) {
      if (seg.duration <= eps_time) {
        throw InvalidParams("segment durations must be large relative to dt");
      }
    }
  }

  // Upper bound on Vdot at the current state, per flow.
  auto decay_bound = [&](const std::vector<Eigen::VectorXd>& xs, double t) {
    if (sc.algorithm == Algorithm::CentralizedContinuous) {
      const auto& agent = sc.problem.agents[0];
      const double d = distance(agent.set, xs[0]);
      return -cfg.alpha.at(t) * d * d - cfg.beta.at(t) * plus_value(agent.inequality, xs[0]);
    }
    double b = 0.0;
    for (int i = 0; i < sc.problem.agent_count(); ++i) {
      const auto& agent = sc.problem.agents[i];
      const double d = distance(agent.set, xs[i]);
      double penalty = plus_value(agent.inequality, xs[i]);
      // the linear-inequality flow applies half the penalty gradient
      if (sc.algorithm == Algorithm::LinearCfp) penalty *= 0.5;
      b -= cfg.tau * w(i) * (d * d + penalty);
    }
    return b;
  };

  record(0.0);
  bool converged = dwell >= cfg.convergence_dwell;
  double t = 0.0;
  std::size_t seg = 0;
  double seg_rem = schedule ? schedule->segments()[0].duration
                            : std::numeric_limits<double>::infinity();
  long k = 0;
  while (!converged) {
    const double horizon_rem = cfg.horizon - t;
    if (horizon_rem <= eps_time) break;
    if (schedule && seg_rem <= eps_time) {
      seg = (seg + 1) % schedule->segments().size();
      seg_rem = schedule->segments()[seg].duration;
      continue;
    }
    // steps are truncated at segment boundaries so none straddles a switch
    const double dt_eff = std::min({cfg.dt, seg_rem, horizon_rem});
    const Digraph& g = schedule ? schedule->graphs()[schedule->segments()[seg].graph] : *fixed;

    double v0 = 0.0, bound = 0.0;
    if (check) {
      v0 = detail::lyapunov_value(states, ref, w, false);
      bound = decay_bound(states, t);
    }

    std::vector<Eigen::VectorXd> rhs;
    switch (sc.algorithm) {
      case Algorithm::CentralizedContinuous:
        rhs.push_back(centralized_continuous_rhs(states[0], t, sc.problem.agents[0], cfg));
        break;
      case Algorithm::LinearCfp:
        rhs = linear_cfp_rhs(states, g, sc.problem, cfg.tau);
        break;
      default:
        rhs = distributed_continuous_rhs(states, g, sc.problem, cfg.tau);
        break;
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
      states[i] += dt_eff * rhs[i];
      detail::check_state_bounded(states[i], cfg.numeric.divergence_threshold, "run");
    }
    t += dt_eff;
    seg_rem -= dt_eff;
    ++k;

    if (check) {
      const double excess =
          detail::lyapunov_value(states, ref, w, false) - v0 - dt_eff * bound;
      note_excess(excess);
      const double allowed = sc.assertions.continuous_order_constant * dt_eff * dt_eff;
      if (excess > allowed) flag_violation(k, "continuous decay", excess, allowed);
    }
    if (k % cfg.record_every == 0) {
      record(t);
      converged = dwell >= cfg.convergence_dwell;
    }
  }
  if (traj.times.back() != t) record(t);
  finish(k, converged ? "converged" : "horizon reached", converged);
  return out;
}

}  // namespace cfp
