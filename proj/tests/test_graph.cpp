#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "cfp/graph.hpp"
#include "cfp/switching.hpp"
#include "test_support.hpp"

using namespace cfp;
using cfp::testing::mat;
using cfp::testing::random_strongly_connected;

namespace {

Digraph unit_cycle(int n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) a(i, (i + n - 1) % n) = 1.0;  // i receives from i-1
  return Digraph(std::move(a));
}

}  // namespace

TEST_CASE("laplacian matches the definition on a 2-node graph", "[graph]") {
  const Digraph g(mat({{0, 1}, {1, 0}}));
  const Eigen::MatrixXd l = laplacian(g);
  CHECK(l(0, 0) == 1.0);
  CHECK(l(0, 1) == -1.0);
  CHECK(l(1, 0) == -1.0);
  CHECK(l(1, 1) == 1.0);
}

TEST_CASE("laplacian of the unit 5-cycle has 1 on the diagonal and -1 on the cycle", "[graph]") {
  const Eigen::MatrixXd l = laplacian(unit_cycle(5));
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double expected = (i == j) ? 1.0 : (j == (i + 4) % 5 ? -1.0 : 0.0);
      CHECK(l(i, j) == expected);
    }
  }
}

TEST_CASE("laplacian rows sum to zero exactly", "[graph]") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const Digraph g = random_strongly_connected(rng, n);
    const Eigen::VectorXd row_sums = laplacian(g) * Eigen::VectorXd::Ones(n);
    CHECK(row_sums.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("diagonal weights are ignored", "[graph]") {
  const Digraph g(mat({{5, 1}, {1, 7}}));
  CHECK(g.weights()(0, 0) == 0.0);
  CHECK(g.weights()(1, 1) == 0.0);
  CHECK(laplacian(g)(0, 0) == 1.0);
}

TEST_CASE("negative weights are rejected", "[graph]") {
  CHECK_THROWS_AS(Digraph(mat({{0, -1}, {1, 0}})), InvalidParams);
}

TEST_CASE("strong connectivity", "[graph]") {
  CHECK(is_strongly_connected(unit_cycle(5)));
  // only a_12 > 0: agent 1 receives from 2, nothing flows back
  CHECK_FALSE(is_strongly_connected(Digraph(mat({{0, 1}, {0, 0}}))));
  std::mt19937 rng(1);
  Eigen::MatrixXd complete = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (i != j) complete(i, j) = 0.25 + (rng() % 8) / 8.0;
    }
  }
  CHECK(is_strongly_connected(Digraph(complete)));
}

TEST_CASE("spanning tree detection", "[graph]") {
  // information path 1 -> 2 -> 3 (a_21, a_32 > 0 only): rooted at node 1
  const Digraph path(mat({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}));
  CHECK(has_spanning_tree(path));
  CHECK_FALSE(is_strongly_connected(path));

  // two disjoint 2-cycles on 4 nodes
  const Digraph split(mat({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));
  CHECK_FALSE(has_spanning_tree(split));

  std::mt19937 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Digraph g = random_strongly_connected(rng, 3 + static_cast<int>(rng() % 5));
    CHECK(has_spanning_tree(g));  // implied by strong connectivity
  }
}

TEST_CASE("balance diagnostics", "[graph]") {
  std::mt19937 rng(3);
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 1; j < 5; ++j) sym(i, j) = sym(j, i) = (rng() % 9) / 8.0;
  }
  CHECK(is_balanced(Digraph(sym)));
  CHECK(is_balanced(unit_cycle(5)));
  CHECK_FALSE(is_balanced(Digraph(mat({{0, 1, 0}, {0, 0, 0}, {0, 0, 0}}))));
}

TEST_CASE("left null eigenvector of balanced graphs is uniform", "[graph]") {
  const Eigen::VectorXd w = left_null_eigenvector(unit_cycle(5));
  for (int i = 0; i < 5; ++i) CHECK_THAT(w(i), Catch::Matchers::WithinAbs(0.2, 1e-12));
}

TEST_CASE("left null eigenvector matches the hand-solved 3-node case", "[graph]") {
  // a_12 = 2, a_23 = 1, a_31 = 1; Gaussian elimination on w^T L = 0 with
  // sum w = 1 gives w = (0.2, 0.4, 0.4)
  const Digraph g(mat({{0, 2, 0}, {0, 0, 1}, {1, 0, 0}}));
  const Eigen::VectorXd w = left_null_eigenvector(g);
  CHECK_THAT(w(0), Catch::Matchers::WithinAbs(0.2, 1e-9));
  CHECK_THAT(w(1), Catch::Matchers::WithinAbs(0.4, 1e-9));
  CHECK_THAT(w(2), Catch::Matchers::WithinAbs(0.4, 1e-9));
  const double residual = (w.transpose() * laplacian(g)).cwiseAbs().maxCoeff();
  CHECK(residual <= 1e-10);
}

TEST_CASE("left null eigenvector is positive with tiny residual on random graphs", "[graph]") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Digraph g = random_strongly_connected(rng, 2 + static_cast<int>(rng() % 7));
    const Eigen::VectorXd w = left_null_eigenvector(g);
    CHECK(w.minCoeff() > 0.0);
    CHECK((w.transpose() * laplacian(g)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK_THAT(w.sum(), Catch::Matchers::WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("left null eigenvector requires strong connectivity", "[graph]") {
  CHECK_THROWS_AS(left_null_eigenvector(Digraph(mat({{0, 1}, {0, 0}}))), NotStronglyConnected);
}

TEST_CASE("spectrum of the 2-node undirected graph is {0, 2}", "[graph]") {
  const auto ev = laplacian_spectrum(Digraph(mat({{0, 1}, {1, 0}})));
  REQUIRE(ev.size() == 2);
  CHECK(std::abs(ev[0]) <= 1e-12);
  CHECK_THAT(ev[1].real(), Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK(std::abs(ev[1].imag()) <= 1e-12);
}

TEST_CASE("spectrum of the unit 5-cycle matches the circulant formula", "[graph]") {
  auto ev = laplacian_spectrum(unit_cycle(5));
  std::vector<std::complex<double>> expected;
  for (int k = 0; k < 5; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / 5.0;
    expected.emplace_back(1.0 - std::cos(theta), -std::sin(theta));
  }
  std::sort(expected.begin(), expected.end(), [](const auto& x, const auto& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  REQUIRE(ev.size() == expected.size());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    CHECK(std::abs(ev[i] - expected[i]) <= 1e-8);
  }
}

TEST_CASE("spectrum of the empty graph is all zeros", "[graph]") {
  const auto ev = laplacian_spectrum(Digraph(Eigen::MatrixXd::Zero(4, 4)));
  for (const auto& l : ev) CHECK(std::abs(l) == 0.0);
}

TEST_CASE("graphs with a spanning tree have one zero eigenvalue, rest in the right half plane",
          "[graph]") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Digraph g = random_strongly_connected(rng, 2 + static_cast<int>(rng() % 7));
    int zeros = 0;
    for (const auto& l : laplacian_spectrum(g)) {
      if (std::abs(l) <= 1e-8) {
        ++zeros;
      } else {
        CHECK(l.real() > 0.0);
      }
    }
    CHECK(zeros == 1);
  }
}

TEST_CASE("step size bound of the unit 5-cycle is 1", "[graph]") {
  CHECK_THAT(step_size_bound(unit_cycle(5)), Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("step size bound of the 2-node undirected graph is 1", "[graph]") {
  CHECK_THAT(step_size_bound(Digraph(mat({{0, 1}, {1, 0}}))),
             Catch::Matchers::WithinAbs(1.0, 1e-9));
}

TEST_CASE("step size bound scales inversely with the weights", "[graph]") {
  std::mt19937 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const Digraph g = random_strongly_connected(rng, 3 + static_cast<int>(rng() % 5));
    const double c = 0.5 + (rng() % 16) / 4.0;
    const Digraph scaled(c * g.weights());
    CHECK_THAT(step_size_bound(scaled), Catch::Matchers::WithinRel(step_size_bound(g) / c, 1e-9));
  }
}

TEST_CASE("step size bound requires a spanning tree", "[graph]") {
  CHECK_THROWS_AS(step_size_bound(Digraph(Eigen::MatrixXd::Zero(3, 3))), NotConnected);
  CHECK_THROWS_AS(step_size_bound(Digraph(Eigen::MatrixXd::Zero(1, 1))), NotConnected);
}

TEST_CASE("any h below the bound keeps all nonzero modes contracting", "[graph]") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Digraph g = random_strongly_connected(rng, 2 + static_cast<int>(rng() % 7));
    const double h = 0.9 * step_size_bound(g);
    for (const auto& l : laplacian_spectrum(g)) {
      if (std::abs(l) <= 1e-8) continue;
      CHECK(std::abs(1.0 - h * l) < 1.0);
    }
  }
}

TEST_CASE("delta graph of a constant schedule thresholds a_ij * T", "[switching]") {
  const Digraph g(mat({{0, 0.5, 0}, {0, 0, 0.1}, {0.3, 0, 0}}));
  const SwitchingSchedule s({g}, {{0, 1.0}});
  // T = 2: integrals are 1.0, 0.2, 0.6
  const Digraph d = delta_graph(s, {2.0, 0.5});
  CHECK(d.weights()(0, 1) == 1.0);
  CHECK(d.weights()(1, 2) == 0.0);
  CHECK(d.weights()(2, 0) == 1.0);
  // threshold exactly at the integral value counts as present
  const Digraph d2 = delta_graph(s, {2.0, 1.0});
  CHECK(d2.weights()(0, 1) == 1.0);
  CHECK(d2.weights()(1, 2) == 0.0);
}

TEST_CASE("delta graph of an alternating square wave", "[switching]") {
  // edge present only in graph 1 with weight 1, graphs alternate 0.2 s each;
  // every window of length 0.4 integrates to exactly 0.2
  const Digraph on(mat({{0, 1}, {0, 0}}));
  const Digraph off(Eigen::MatrixXd::Zero(2, 2));
  const SwitchingSchedule s({on, off}, {{0, 0.2}, {1, 0.2}});
  CHECK(delta_graph(s, {0.4, 0.2}).weights()(0, 1) == 1.0);
  CHECK(delta_graph(s, {0.4, 0.2000001}).weights()(0, 1) == 0.0);
  CHECK(delta_graph(s, {0.4, 0.1}).weights()(0, 1) == 1.0);
}

TEST_CASE("delta graph window shorter than a gap drops the edge", "[switching]") {
  const Digraph on(mat({{0, 1}, {0, 0}}));
  const Digraph off(Eigen::MatrixXd::Zero(2, 2));
  const SwitchingSchedule s({on, off}, {{0, 0.2}, {1, 0.2}});
  // a window of length 0.2 fully inside the off segment integrates to 0
  CHECK(delta_graph(s, {0.2, 1e-6}).weights()(0, 1) == 0.0);
}

TEST_CASE("delta graph of a constant schedule equals the support graph", "[switching]") {
  std::mt19937 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Digraph g = random_strongly_connected(rng, 2 + static_cast<int>(rng() % 5));
    const SwitchingSchedule s({g}, {{0, 0.7}});
    // min positive weight is 1/8; delta = T/8 keeps every positive edge
    const Digraph d = delta_graph(s, {1.0, 0.125});
    for (int i = 0; i < g.size(); ++i) {
      for (int j = 0; j < g.size(); ++j) {
        CHECK(d.weights()(i, j) == (g.weights()(i, j) > 0.0 ? 1.0 : 0.0));
      }
    }
  }
}

TEST_CASE("edges present in every graph are delta-edges", "[switching]") {
  std::mt19937 rng(9);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(1, 0) = 0.5;
  Eigen::MatrixXd b = a;
  b(1, 0) = 1.0;
  b(2, 1) = 1.0;
  const SwitchingSchedule s({Digraph(a), Digraph(b)}, {{0, 0.3}, {1, 0.5}});
  // edge (0 -> 1) has weight >= 0.5 everywhere: any window of length T
  // integrates to at least 0.5 T
  const double T = 0.64;
  const Digraph d = delta_graph(s, {T, 0.5 * T});
  CHECK(d.weights()(1, 0) == 1.0);
}

TEST_CASE("contraction rate matches the closed form at n=2, delta=1, T=1", "[switching]") {
  CHECK_THAT(contraction_rate(2, 1.0, 1.0),
             Catch::Matchers::WithinAbs(std::sqrt(31.0 / 32.0), 1e-12));
}

TEST_CASE("contraction rate stays inside (0,1) and grows with T", "[switching]") {
  std::mt19937 rng(10);
  std::uniform_real_distribution<double> dd(0.01, 10.0);
  std::uniform_real_distribution<double> dt(0.01, 100.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 49);
    const double gamma = contraction_rate(n, dd(rng), dt(rng));
    CHECK(gamma > 0.0);
    CHECK(gamma < 1.0);
  }
  const double g1 = contraction_rate(4, 0.5, 1.0);
  const double g2 = contraction_rate(4, 0.5, 2.0);
  const double g3 = contraction_rate(4, 0.5, 8.0);
  CHECK(g1 < g2);
  CHECK(g2 < g3);
}

TEST_CASE("contraction rate rejects bad parameters", "[switching]") {
  CHECK_THROWS_AS(contraction_rate(1, 1.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(contraction_rate(3, 0.0, 1.0), InvalidParams);
  CHECK_THROWS_AS(contraction_rate(3, 1.0, -2.0), InvalidParams);
}
