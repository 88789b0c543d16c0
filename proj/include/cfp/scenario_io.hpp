#pragma once

#include <Eigen/Dense>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cfp/errors.hpp"
#include "cfp/run.hpp"
#include "cfp/scenario.hpp"

namespace cfp {

namespace io_detail {

using nlohmann::json;

[[noreturn]] inline void bad(const std::string& where, const std::string& why) {
  throw ScenarioError(where + ": " + why);
}

inline const json& require(const json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) bad(where, std::string("missing field '") + key + "'");
  return *it;
}

inline Eigen::VectorXd as_vector(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) bad(where, "expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline Eigen::MatrixXd as_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Eigen::MatrixXd m(j.size(), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = as_vector(j[r], where + " row " + std::to_string(r + 1));
    if (static_cast<std::size_t>(row.size()) != cols) bad(where, "ragged rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

inline ConvexSet parse_set(const json& j, const std::string& where) {
  const std::string type = require(j, "type", where).get<std::string>();
  if (type == "box") {
    return Box{as_vector(require(j, "lower", where), where + ".lower"),
               as_vector(require(j, "upper", where), where + ".upper")};
  }
  if (type == "halfspace") {
    return Halfspace{as_vector(require(j, "a", where), where + ".a"),
                     require(j, "b", where).get<double>()};
  }
  if (type == "ball") {
    return Ball{as_vector(require(j, "center", where), where + ".center"),
                require(j, "radius", where).get<double>()};
  }
  if (type == "hyperplane" || type == "affine") {
    return Hyperplane{as_vector(require(j, "a", where), where + ".a"),
                      require(j, "b", where).get<double>()};
  }
  if (type == "whole_space") return WholeSpace{};
  bad(where, "unknown set type '" + type + "'");
}

inline ConvexInequality parse_inequality(const json& j, Eigen::Index dim,
                                         const std::string& where) {
  const std::string type = require(j, "type", where).get<std::string>();
  ConvexInequality g = [&] {
    if (type == "linear") {
      return ConvexInequality::linear(as_vector(require(j, "a", where), where + ".a"),
                                      require(j, "b", where).get<double>());
    }
    if (type == "constant") {
      return ConvexInequality::constant(require(j, "value", where).get<double>(), dim);
    }
    if (type == "quadratic") {
      return ConvexInequality::quadratic(as_matrix(require(j, "q", where), where + ".q"),
                                         as_vector(require(j, "c", where), where + ".c"),
                                         require(j, "d", where).get<double>());
    }
    if (type == "linear_block") {
      return ConvexInequality::linear_block(as_matrix(require(j, "a", where), where + ".a"),
                                            as_vector(require(j, "b", where), where + ".b"));
    }
    bad(where, "unknown inequality type '" + type + "'");
  }();
  if (const auto it = j.find("subgradient_bound"); it != j.end()) {
    const double k = it->get<double>();
    if (k < 0.0) bad(where, "subgradient_bound must be non-negative");
    g.subgradient_bound = k;
  }
  return g;
}

/// Node ids and graph indices are 1-based in scenario files.
inline Digraph parse_digraph(const json& j, const std::string& where) {
  if (const auto it = j.find("weights"); it != j.end()) {
    Eigen::MatrixXd m = as_matrix(*it, where + ".weights");
    if (m.rows() != m.cols()) bad(where, "weight matrix must be square");
    return Digraph(std::move(m));
  }
  const int n = require(j, "n", where).get<int>();
  std::vector<std::tuple<int, int, double>> edges;
  for (const auto& e : require(j, "edges", where)) {
    const int from = require(e, "from", where + ".edges").get<int>();
    const int to = require(e, "to", where + ".edges").get<int>();
    const double wgt = e.value("weight", 1.0);
    if (from < 1 || from > n || to < 1 || to > n) bad(where + ".edges", "node id out of range 1..n");
    edges.emplace_back(from - 1, to - 1, wgt);
  }
  return Digraph::from_edges(n, edges);
}

inline Topology parse_topology(const json& j, const std::string& where) {
  const std::string type = require(j, "type", where).get<std::string>();
  if (type == "digraph") return parse_digraph(j, where);
  if (type != "switching") bad(where, "unknown topology type '" + type + "'");
  std::vector<Digraph> graphs;
  for (const auto& gj : require(j, "graphs", where)) {
    graphs.push_back(parse_digraph(gj, where + ".graphs"));
  }
  std::vector<ScheduleSegment> segments;
  for (const auto& sj : require(j, "segments", where)) {
    const int gi = require(sj, "graph", where + ".segments").get<int>();
    if (gi < 1 || static_cast<std::size_t>(gi) > graphs.size()) {
      bad(where + ".segments", "graph index out of range 1..#graphs");
    }
    segments.push_back({static_cast<std::size_t>(gi - 1),
                        require(sj, "duration", where + ".segments").get<double>()});
  }
  return SwitchingSchedule(std::move(graphs), std::move(segments));
}

inline StepSchedule parse_schedule(const json& j, ScheduleRole role, const std::string& where) {
  const std::string type = require(j, "type", where).get<std::string>();
  if (type == "constant") {
    return StepSchedule::constant(require(j, "value", where).get<double>(), role);
  }
  if (type == "harmonic") {
    return StepSchedule::harmonic(require(j, "c0", where).get<double>(),
                                  require(j, "c1", where).get<double>(), role);
  }
  if (type == "custom") {
    const Eigen::VectorXd s = as_vector(require(j, "samples", where), where + ".samples");
    return StepSchedule::custom(std::vector<double>(s.data(), s.data() + s.size()), role);
  }
  bad(where, "unknown schedule type '" + type + "'");
}

inline Algorithm parse_algorithm(const std::string& name, const std::string& where) {
  if (name == "centralized_continuous") return Algorithm::CentralizedContinuous;
  if (name == "centralized_discrete") return Algorithm::CentralizedDiscrete;
  if (name == "distributed_continuous") return Algorithm::DistributedContinuous;
  if (name == "distributed_discrete") return Algorithm::DistributedDiscrete;
  if (name == "linear_cfp") return Algorithm::LinearCfp;
  bad(where, "unknown algorithm '" + name + "'");
}

}  // namespace io_detail

/// Builds a Scenario from its JSON form. `defaults` seeds the tolerance
/// record; explicit scenario values win.
inline Scenario scenario_from_json(const nlohmann::json& j,
                                   const NumericConfig& defaults = {}) {
  using namespace io_detail;
  const auto& pj = require(j, "problem", "scenario");
  ProblemSpec problem;
  problem.dim = require(pj, "dim", "problem").get<Eigen::Index>();
  for (const auto& aj : require(pj, "agents", "problem")) {
    const std::string where = "problem.agents[" + std::to_string(problem.agents.size() + 1) + "]";
    AgentConstraint agent{
        parse_inequality(require(aj, "inequality", where), problem.dim, where + ".inequality"),
        parse_set(require(aj, "set", where), where + ".set")};
    problem.agents.push_back(std::move(agent));
  }
  if (const auto it = pj.find("subgradient_bound"); it != pj.end()) {
    problem.subgradient_bound = it->get<double>();
  }

  Topology topology = parse_topology(require(j, "topology", "scenario"), "topology");
  const Algorithm algorithm =
      parse_algorithm(require(j, "algorithm", "scenario").get<std::string>(), "algorithm");

  SolverConfig cfg;
  cfg.numeric = defaults;
  if (const auto it = j.find("config"); it != j.end()) {
    const auto& cj = *it;
    cfg.tau = cj.value("tau", cfg.tau);
    cfg.h = cj.value("h", cfg.h);
    cfg.dt = cj.value("dt", cfg.dt);
    cfg.horizon = cj.value("horizon", cfg.horizon);
    cfg.record_every = cj.value("record_every", cfg.record_every);
    cfg.convergence_dwell = cj.value("dwell", cfg.convergence_dwell);
    cfg.allow_step_size_override =
        cj.value("allow_step_size_override", cfg.allow_step_size_override);
    cfg.numeric.convergence_tol = cj.value("tolerance", cfg.numeric.convergence_tol);
    if (const auto a = cj.find("alpha"); a != cj.end()) {
      cfg.alpha = parse_schedule(*a, ScheduleRole::Alpha, "config.alpha");
    }
    if (const auto b = cj.find("beta"); b != cj.end()) {
      cfg.beta = parse_schedule(*b, ScheduleRole::Beta, "config.beta");
    }
  }

  std::vector<Eigen::VectorXd> init;
  for (const auto& xj : require(j, "initial_states", "scenario")) {
    init.push_back(as_vector(xj, "initial_states[" + std::to_string(init.size() + 1) + "]"));
  }

  AssertionConfig assertions;
  if (const auto it = j.find("assertions"); it != j.end()) {
    assertions.lyapunov = it->value("lyapunov", false);
    if (const auto r = it->find("reference"); r != it->end()) {
      assertions.reference = as_vector(*r, "assertions.reference");
    }
    assertions.discrete_tol = it->value("discrete_tol", assertions.discrete_tol);
    assertions.continuous_order_constant =
        it->value("continuous_order_constant", assertions.continuous_order_constant);
    assertions.abort_on_violation = it->value("abort", assertions.abort_on_violation);
  }

  std::optional<Eigen::VectorXd> expected;
  if (const auto it = j.find("expected"); it != j.end()) {
    if (const auto p = it->find("point"); p != it->end()) {
      expected = as_vector(*p, "expected.point");
    }
  }

  Scenario sc{std::move(problem), std::move(topology),     algorithm, std::move(cfg),
              std::move(init),    std::move(assertions), std::move(expected)};
  try {
    sc.validate();
  } catch (const Error& e) {
    io_detail::bad("scenario", e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path,
                              const NumericConfig& defaults = {}) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  try {
    return scenario_from_json(j, defaults);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

/// Loads just a topology object ({"type": "digraph"|"switching", ...}).
inline Topology load_topology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open graph file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  return io_detail::parse_topology(j, "topology");
}

namespace io_detail {

/// All file output goes through write-temp-then-rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace io_detail

/// CSV with one row per (time, agent); the per-time metrics repeat on each
/// agent row for plot-tool convenience. Header:
///   t,agent,x0,...,x{m-1},consensus_error,max_set_residual,max_inequality_residual,lyapunov
inline std::string trajectory_to_csv(const Trajectory& traj, Eigen::Index dim) {
  std::ostringstream out;
  out << "t,agent";
  for (Eigen::Index d = 0; d < dim; ++d) out << ",x" << d;
  out << ",consensus_error,max_set_residual,max_inequality_residual,lyapunov\n";
  for (std::size_t s = 0; s < traj.samples(); ++s) {
    const auto& m = traj.metrics[s];
    for (std::size_t i = 0; i < traj.states[s].size(); ++i) {
      out << io_detail::format_double(traj.times[s]) << ',' << (i + 1);
      for (Eigen::Index d = 0; d < dim; ++d) {
        out << ',' << io_detail::format_double(traj.states[s][i](d));
      }
      out << ',' << io_detail::format_double(m.consensus_error) << ','
          << io_detail::format_double(m.max_set_residual) << ','
          << io_detail::format_double(m.max_inequality_residual) << ','
          << io_detail::format_double(m.lyapunov) << '\n';
    }
  }
  return out.str();
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                                 Eigen::Index dim) {
  io_detail::atomic_write(path, trajectory_to_csv(traj, dim));
}

inline nlohmann::json report_to_json(const RunReport& rep) {
  nlohmann::json j;
  j["converged"] = rep.converged;
  j["final_point"] = std::vector<double>(rep.final_point.data(),
                                         rep.final_point.data() + rep.final_point.size());
  j["final_metrics"] = {{"consensus_error", rep.final_metrics.consensus_error},
                        {"max_set_residual", rep.final_metrics.max_set_residual},
                        {"max_inequality_residual", rep.final_metrics.max_inequality_residual},
                        {"lyapunov", rep.final_metrics.lyapunov}};
  j["steps"] = rep.steps;
  j["wall_time_s"] = rep.wall_time_s;
  j["assertion_violations"] = rep.assertion_violations;
  j["max_lyapunov_excess"] = rep.max_lyapunov_excess;
  j["stop_reason"] = rep.stop_reason;
  if (rep.step_size_bound) j["step_size_bound"] = *rep.step_size_bound;
  return j;
}

inline void write_report_json(const std::filesystem::path& path, const RunReport& rep) {
  io_detail::atomic_write(path, report_to_json(rep).dump(2) + "\n");
}

}  // namespace cfp
