// cfp: run convex-feasibility scenarios, inspect communication graphs and
// validate step-size schedules from the command line.
//
// Exit codes: 0 success (and convergence for runs), 1 nonconvergence or a
// failed run, 2 input error.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "cfp/cfp.hpp"

namespace {

cfp::NumericConfig default_numeric() {
  cfp::NumericConfig cfg;
  if (const char* env = std::getenv("CFP_NUMERIC_TOLERANCE")) {
    try {
      cfg.convergence_tol = std::stod(env);
    } catch (const std::exception&) {
      throw cfp::ScenarioError("CFP_NUMERIC_TOLERANCE is not a number: " + std::string(env));
    }
  }
  return cfg;
}

struct RunOptions {
  std::string out_path;
  std::string report_path;
  std::optional<double> tau, h, dt, horizon;
};

void apply_overrides(cfp::Scenario& sc, const RunOptions& opt) {
  if (opt.tau) sc.config.tau = *opt.tau;
  if (opt.h) sc.config.h = *opt.h;
  if (opt.dt) sc.config.dt = *opt.dt;
  if (opt.horizon) sc.config.horizon = *opt.horizon;
}

int execute(cfp::Scenario& sc, const RunOptions& opt) {
  apply_overrides(sc, opt);
  cfp::RunResult result;
  try {
    result = cfp::run(sc);
  } catch (const cfp::Divergence& e) {
    std::cerr << "run diverged: " << e.what() << "\n";
    return 1;
  } catch (const cfp::AssertionFailure& e) {
    std::cerr << "runtime property check failed: " << e.what() << "\n";
    return 1;
  }
  const auto& rep = result.report;
  if (!opt.out_path.empty()) {
    cfp::write_trajectory_csv(opt.out_path, result.trajectory, sc.problem.dim);
  }
  if (!opt.report_path.empty()) {
    cfp::write_report_json(opt.report_path, rep);
  } else {
    std::cout << cfp::report_to_json(rep).dump(2) << "\n";
  }
  std::cerr << (rep.converged ? "converged" : "did not converge") << " after " << rep.steps
            << " steps (" << rep.stop_reason << "); final point [";
  for (Eigen::Index i = 0; i < rep.final_point.size(); ++i) {
    std::cerr << (i ? ", " : "") << rep.final_point(i);
  }
  std::cerr << "], consensus error " << rep.final_metrics.consensus_error << ", residuals "
            << rep.final_metrics.max_set_residual << " / "
            << rep.final_metrics.max_inequality_residual << "\n";
  return rep.converged ? 0 : 1;
}

void print_digraph_diagnostics(const cfp::Digraph& g, const std::string& label, double h) {
  std::cout << label << ": " << g.size() << " nodes\n";
  std::cout << "  strongly connected: " << (cfp::is_strongly_connected(g) ? "yes" : "no") << "\n";
  std::cout << "  spanning tree:      " << (cfp::has_spanning_tree(g) ? "yes" : "no") << "\n";
  std::cout << "  balanced:           " << (cfp::is_balanced(g) ? "yes" : "no") << "\n";
  std::cout << "  laplacian spectrum: ";
  for (const auto& ev : cfp::laplacian_spectrum(g)) {
    std::cout << "(" << ev.real() << (ev.imag() < 0 ? "" : "+") << ev.imag() << "i) ";
  }
  std::cout << "\n";
  if (cfp::has_spanning_tree(g) && g.weights().sum() > 0.0) {
    const double rho = cfp::step_size_bound(g);
    std::cout << "  step size bound:    rho = " << rho << "\n";
    if (h > 0.0) {
      std::cout << "  consensus gain:     h = " << h << (h < rho ? " < rho (ok)" : " >= rho (!)")
                << "\n";
    }
  }
  if (cfp::is_strongly_connected(g)) {
    const Eigen::VectorXd w = cfp::left_null_eigenvector(g);
    std::cout << "  left null vector:   [";
    for (Eigen::Index i = 0; i < w.size(); ++i) std::cout << (i ? ", " : "") << w(i);
    std::cout << "]\n";
  }
}

void print_topology_diagnostics(const cfp::Topology& topology, double h, double window,
                                double delta) {
  if (const auto* g = std::get_if<cfp::Digraph>(&topology)) {
    print_digraph_diagnostics(*g, "digraph", h);
    return;
  }
  const auto& s = std::get<cfp::SwitchingSchedule>(topology);
  std::cout << "switching schedule: " << s.graphs().size() << " graphs, period " << s.period()
            << " s\n";
  for (std::size_t i = 0; i < s.graphs().size(); ++i) {
    print_digraph_diagnostics(s.graphs()[i], "graph " + std::to_string(i + 1), 0.0);
  }
  const cfp::Digraph d = cfp::delta_graph(s, {window, delta});
  std::cout << "delta-graph (T = " << window << ", delta = " << delta << "): edges";
  for (int i = 0; i < d.size(); ++i) {
    for (int j = 0; j < d.size(); ++j) {
      if (d.weights()(i, j) > 0.0) std::cout << " " << (j + 1) << "->" << (i + 1);
    }
  }
  std::cout << "\n  strongly connected: " << (cfp::is_strongly_connected(d) ? "yes" : "no")
            << "\n";
  std::cout << "  contraction rate:   gamma = " << cfp::contraction_rate(s.size(), delta, window)
            << "\n";
}

cfp::ConvergenceCondition parse_condition(const std::string& name) {
  if (name == "centralized-continuous") return cfp::ConvergenceCondition::CentralizedContinuous;
  if (name == "centralized-discrete") return cfp::ConvergenceCondition::CentralizedDiscrete;
  if (name == "distributed-continuous") {
    return cfp::ConvergenceCondition::DistributedContinuousFixed;
  }
  if (name == "distributed-switching") {
    return cfp::ConvergenceCondition::DistributedContinuousSwitching;
  }
  if (name == "distributed-discrete") return cfp::ConvergenceCondition::DistributedDiscrete;
  throw cfp::ScenarioError("unknown convergence condition '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex feasibility problem solver over communication graphs"};
  app.require_subcommand(1);

  // ---- run -----------------------------------------------------------------
  auto* cmd_run = app.add_subcommand("run", "run a scenario file");
  std::string scenario_path;
  RunOptions run_opt;
  cmd_run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
  cmd_run->add_option("--out", run_opt.out_path, "trajectory CSV output path");
  cmd_run->add_option("--report", run_opt.report_path, "run report JSON output path");
  cmd_run->add_option("--tau", run_opt.tau, "override the coupling gain");
  cmd_run->add_option("--h", run_opt.h, "override the consensus gain");
  cmd_run->add_option("--dt", run_opt.dt, "override the Euler step");
  cmd_run->add_option("--horizon", run_opt.horizon, "override the horizon");

  // ---- check-graph ---------------------------------------------------------
  auto* cmd_check = app.add_subcommand("check-graph", "print graph diagnostics");
  std::string check_scenario, check_graph;
  double window = 0.4, delta = 0.2;
  cmd_check->add_option("--scenario", check_scenario, "scenario JSON file");
  cmd_check->add_option("--graph", check_graph, "topology JSON file");
  cmd_check->add_option("--window", window, "delta-graph window length T");
  cmd_check->add_option("--delta", delta, "delta-graph integral threshold");

  // ---- paper-case ----------------------------------------------------------
  auto* cmd_case = app.add_subcommand("paper-case", "run a bundled case (1-3)");
  int case_id = 1;
  RunOptions case_opt;
  cmd_case->add_option("case", case_id, "case number (1, 2 or 3)")->required();
  cmd_case->add_option("--out", case_opt.out_path, "trajectory CSV output path");
  cmd_case->add_option("--report", case_opt.report_path, "run report JSON output path");
  cmd_case->add_option("--tau", case_opt.tau, "override the coupling gain");
  cmd_case->add_option("--h", case_opt.h, "override the consensus gain");
  cmd_case->add_option("--dt", case_opt.dt, "override the Euler step");
  cmd_case->add_option("--horizon", case_opt.horizon, "override the horizon");

  // ---- validate-schedule ----------------------------------------------------
  auto* cmd_sched = app.add_subcommand("validate-schedule", "check step-size conditions");
  std::string sched_type = "harmonic", sched_role = "alpha", condition = "distributed-discrete";
  double sched_value = 1.0, c0 = 1.0, c1 = 0.02;
  std::vector<double> samples;
  cmd_sched->add_option("--type", sched_type, "constant | harmonic | custom");
  cmd_sched->add_option("--value", sched_value, "constant value");
  cmd_sched->add_option("--c0", c0, "harmonic numerator");
  cmd_sched->add_option("--c1", c1, "harmonic slope");
  cmd_sched->add_option("--samples", samples, "custom samples");
  cmd_sched->add_option("--role", sched_role, "alpha | beta");
  cmd_sched->add_option("--for", condition,
                        "centralized-continuous | centralized-discrete | "
                        "distributed-continuous | distributed-switching | distributed-discrete");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_run->parsed()) {
      cfp::Scenario sc = cfp::load_scenario(scenario_path, default_numeric());
      return execute(sc, run_opt);
    }
    if (cmd_case->parsed()) {
      cfp::Scenario sc = cfp::builtin_scenario(case_id);
      sc.config.numeric.convergence_tol = default_numeric().convergence_tol == cfp::NumericConfig{}.convergence_tol
                                              ? sc.config.numeric.convergence_tol
                                              : default_numeric().convergence_tol;
      return execute(sc, case_opt);
    }
    if (cmd_check->parsed()) {
      if (check_scenario.empty() == check_graph.empty()) {
        std::cerr << "error: pass exactly one of --scenario or --graph\n";
        return 2;
      }
      double h = 0.0;
      cfp::Topology topology = [&]() -> cfp::Topology {
        if (!check_graph.empty()) return cfp::load_topology(check_graph);
        cfp::Scenario sc = cfp::load_scenario(check_scenario, default_numeric());
        if (cfp::is_discrete(sc.algorithm)) h = sc.config.h;
        return sc.topology;
      }();
      print_topology_diagnostics(topology, h, window, delta);
      return 0;
    }
    // validate-schedule
    const cfp::ScheduleRole role =
        sched_role == "beta" ? cfp::ScheduleRole::Beta : cfp::ScheduleRole::Alpha;
    cfp::StepSchedule schedule = [&] {
      if (sched_type == "constant") return cfp::StepSchedule::constant(sched_value, role);
      if (sched_type == "harmonic") return cfp::StepSchedule::harmonic(c0, c1, role);
      if (sched_type == "custom") return cfp::StepSchedule::custom(samples, role);
      throw cfp::ScenarioError("unknown schedule type '" + sched_type + "'");
    }();
    const auto report = cfp::validate_schedule(schedule, parse_condition(condition));
    const char* status = report.status == cfp::ScheduleValidity::Status::Valid     ? "valid"
                         : report.status == cfp::ScheduleValidity::Status::Invalid ? "invalid"
                                                                                   : "unknown";
    std::cout << "status: " << status << "\n";
    for (const auto& r : report.reasons) std::cout << "  - " << r << "\n";
    if (std::holds_alternative<cfp::CustomSchedule>(schedule.kind)) {
      std::cout << "  partial sum: " << report.partial_sum
                << ", partial sum of squares: " << report.partial_sum_sq << "\n";
    }
    return 0;
  } catch (const cfp::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
