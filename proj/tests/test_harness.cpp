#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "cfp/metrics.hpp"
#include "cfp/run.hpp"
#include "cfp/scenario.hpp"
#include "test_support.hpp"

using namespace cfp;
using cfp::testing::vec;

TEST_CASE("consensus error basics", "[harness]") {
  CHECK(consensus_error({vec({1, 2}), vec({1, 2}), vec({1, 2})}) == 0.0);
  CHECK_THAT(consensus_error({vec({0, 0}), vec({3, 4})}), Catch::Matchers::WithinAbs(5.0, 1e-15));
  // permutation invariance
  const std::vector<Eigen::VectorXd> a = {vec({0, 0}), vec({1, 1}), vec({-2, 3})};
  const std::vector<Eigen::VectorXd> b = {vec({-2, 3}), vec({0, 0}), vec({1, 1})};
  CHECK(consensus_error(a) == consensus_error(b));
}

TEST_CASE("feasibility residuals of the bundled problem", "[harness]") {
  const ProblemSpec p = builtin_problem();
  // the reported consensus point satisfies everything with slack
  const auto at_limit = feasibility_residuals(p, vec({2.58, 1.23}));
  CHECK(at_limit.max_set_residual <= 1e-9);
  CHECK(at_limit.max_inequality_residual <= 1e-9);
  // the origin violates only the boxes; the nearest corner of the second box
  // is (2.5, 1)
  const auto at_origin = feasibility_residuals(p, vec({0, 0}));
  CHECK_THAT(at_origin.max_set_residual,
             Catch::Matchers::WithinAbs(std::sqrt(2.5 * 2.5 + 1.0), 1e-12));
  CHECK(at_origin.max_inequality_residual == 0.0);
}

TEST_CASE("bundled scenarios carry the documented gains", "[harness]") {
  CHECK(builtin_scenario(1).config.tau == 20.0);
  CHECK(builtin_scenario(2).config.tau == 35.0);
  const Scenario c3 = builtin_scenario(3);
  CHECK(c3.config.h == 0.25);
  const auto* alpha = std::get_if<HarmonicSchedule>(&c3.config.alpha.kind);
  REQUIRE(alpha != nullptr);
  CHECK(alpha->c0 == 1.0);
  CHECK(alpha->c1 == 0.02);
  CHECK_THROWS_AS(builtin_scenario(0), InvalidParams);
}

TEST_CASE("zero horizon produces an empty trajectory", "[harness]") {
  Scenario sc = builtin_scenario(1);
  sc.config.horizon = 0.0;
  const auto result = run(sc);
  CHECK(result.trajectory.empty());
  CHECK_FALSE(result.report.converged);
  CHECK(result.report.steps == 0);
}

TEST_CASE("an infeasible toy problem does not converge", "[harness]") {
  // g(x) = x + 1 <= 0 wants x <= -1, the set demands x >= 0
  ProblemSpec p;
  p.dim = 1;
  p.agents.push_back({ConvexInequality::linear(vec({1}), -1.0), Halfspace{vec({-1}), 0.0}});
  SolverConfig cfg;
  cfg.horizon = 2.0;
  cfg.record_every = 10;
  Scenario sc{std::move(p),
              Digraph(Eigen::MatrixXd::Zero(1, 1)),
              Algorithm::CentralizedContinuous,
              cfg,
              {vec({2.0})},
              {},
              {}};
  const auto result = run(sc);
  CHECK_FALSE(result.report.converged);
  CHECK(result.report.final_metrics.max_inequality_residual > 1e-3);
}

TEST_CASE("identical scenarios produce bit-identical trajectories", "[harness]") {
  const auto a = run(builtin_scenario(3));
  const auto b = run(builtin_scenario(3));
  REQUIRE(a.trajectory.samples() == b.trajectory.samples());
  for (std::size_t s = 0; s < a.trajectory.samples(); ++s) {
    CHECK(a.trajectory.times[s] == b.trajectory.times[s]);
    for (std::size_t i = 0; i < a.trajectory.states[s].size(); ++i) {
      CHECK(a.trajectory.states[s][i] == b.trajectory.states[s][i]);
    }
    CHECK(a.trajectory.metrics[s].consensus_error == b.trajectory.metrics[s].consensus_error);
    CHECK(a.trajectory.metrics[s].lyapunov == b.trajectory.metrics[s].lyapunov);
  }
}

TEST_CASE("metrics agree at shared time stamps regardless of the recording stride",
          "[harness]") {
  Scenario coarse = builtin_scenario(1);
  coarse.config.horizon = 1.0;  // short run, no early stop
  Scenario fine = coarse;
  fine.config.record_every = 2;
  coarse.config.record_every = 10;
  const auto rf = run(fine);
  const auto rc = run(coarse);
  std::size_t jf = 0;
  int matched = 0;
  for (std::size_t sc_i = 0; sc_i < rc.trajectory.samples(); ++sc_i) {
    while (jf < rf.trajectory.samples() && rf.trajectory.times[jf] < rc.trajectory.times[sc_i]) {
      ++jf;
    }
    if (jf == rf.trajectory.samples()) break;
    if (rf.trajectory.times[jf] != rc.trajectory.times[sc_i]) continue;
    ++matched;
    const auto& mf = rf.trajectory.metrics[jf];
    const auto& mc = rc.trajectory.metrics[sc_i];
    CHECK(mf.consensus_error == mc.consensus_error);
    CHECK(mf.max_set_residual == mc.max_set_residual);
    CHECK(mf.max_inequality_residual == mc.max_inequality_residual);
    CHECK(mf.lyapunov == mc.lyapunov);
  }
  CHECK(matched > 10);
}

TEST_CASE("converged reports have final metrics below tolerance", "[harness]") {
  const auto result = run(builtin_scenario(3));
  REQUIRE(result.report.converged);
  const double tol = builtin_scenario(3).config.numeric.convergence_tol;
  CHECK(result.report.final_metrics.consensus_error <= tol);
  CHECK(result.report.final_metrics.max_set_residual <= tol);
  CHECK(result.report.final_metrics.max_inequality_residual <= tol);
}

TEST_CASE("lyapunov metric is non-increasing over the tail of a converged run", "[harness]") {
  const auto result = run(builtin_scenario(1));
  REQUIRE(result.report.converged);
  const auto& m = result.trajectory.metrics;
  const std::size_t tail_start = m.size() - m.size() / 10;
  for (std::size_t s = tail_start; s + 1 < m.size(); ++s) {
    CHECK(m[s + 1].lyapunov <= m[s].lyapunov + 1e-8);
  }
}

TEST_CASE("scenario validation catches inconsistencies", "[harness]") {
  Scenario sc = builtin_scenario(1);
  sc.initial_states.pop_back();
  CHECK_THROWS_AS(sc.validate(), DimensionMismatch);

  Scenario sc2 = builtin_scenario(1);
  sc2.algorithm = Algorithm::CentralizedContinuous;  // five agents
  CHECK_THROWS_AS(sc2.validate(), InvalidParams);

  Scenario sc3 = builtin_scenario(3);
  sc3.topology = builtin_switching_schedule();  // discrete + switching
  CHECK_THROWS_AS(sc3.validate(), InvalidParams);
}
