#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dg/error.hpp"
#include "dg/realize.hpp"
#include "dg/rng.hpp"

using dg::DescentConfig;
using dg::Matrix;
using dg::WeightedGraph;

namespace {

Matrix random_points(std::size_t n, std::size_t k, dg::Rng& rng, double r = 1.5) {
  Matrix x(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) x(i, j) = rng.uniform(-r, r);
  return x;
}

// Central finite differences of a scalar function of the realization.
template <typename F>
Matrix fd_gradient(F&& f, Matrix x, double h = 1e-6) {
  Matrix g(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double keep = x(i, j);
      x(i, j) = keep + h;
      const double up = f(x);
      x(i, j) = keep - h;
      const double dn = f(x);
      x(i, j) = keep;
      g(i, j) = (up - dn) / (2.0 * h);
    }
  }
  return g;
}

void check_gradients_close(const Matrix& analytic, const Matrix& fd, double tol) {
  const double scale = std::max(1.0, max_abs(analytic));
  CHECK(max_abs(analytic - fd) <= tol * scale);
}

// Givens-rotation congruence x -> x Q + 1 c^T.
Matrix congruent_copy(const Matrix& x, double angle, std::size_t a, std::size_t b,
                      const std::vector<double>& shift) {
  Matrix y = x;
  const double c = std::cos(angle), s = std::sin(angle);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double xa = x(i, a), xb = x(i, b);
    y(i, a) = c * xa - s * xb;
    y(i, b) = s * xa + c * xb;
    for (std::size_t j = 0; j < x.cols(); ++j) y(i, j) += shift[j];
  }
  return y;
}

const WeightedGraph kUnitSquareCycle(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}});

}  // namespace

TEST_CASE("merit function on hand instances") {
  const WeightedGraph p3(3, {{0, 1, 1}, {1, 2, 1}});
  const Matrix exact = Matrix::from_rows({{0}, {1}, {2}});
  CHECK(dg::quartic_objective(p3, exact) == 0.0);
  CHECK(max_abs(dg::quartic_gradient(p3, exact)) == 0.0);

  const WeightedGraph k2(2, {{0, 1, 1}});
  const Matrix coincident(2, 1);  // both points at the origin
  CHECK(dg::quartic_objective(k2, coincident) == 1.0);
  CHECK(max_abs(dg::quartic_gradient(k2, coincident)) == 0.0);

  Matrix wrong(4, 2);
  CHECK_THROWS_WITH_AS(dg::quartic_objective(p3, wrong), doctest::Contains("DimensionMismatch"),
                       dg::Error);
}

TEST_CASE("analytic gradient matches finite differences") {
  dg::Rng rng(71);
  const WeightedGraph g(5, {{0, 1, 1.0}, {1, 2, 0.5}, {2, 3, 1.5}, {3, 4, 1.0}, {0, 4, 2.0},
                            {1, 3, 1.2}});
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix x = random_points(5, 3, rng);
    const Matrix analytic = dg::quartic_gradient(g, x);
    const Matrix fd = fd_gradient([&](const Matrix& p) { return dg::quartic_objective(g, p); }, x);
    check_gradients_close(analytic, fd, 1e-5);
  }
}

TEST_CASE("objective is congruence invariant") {
  dg::Rng rng(73);
  const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 2, 1.4}});
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_points(4, 3, rng);
    const Matrix y = congruent_copy(x, rng.uniform(0.0, 6.28), 0, 2,
                                    {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)});
    CHECK(std::fabs(dg::quartic_objective(g, x) - dg::quartic_objective(g, y)) <=
          1e-10 * std::max(1.0, dg::quartic_objective(g, x)));
  }
}

TEST_CASE("descent realizes feasible instances") {
  SUBCASE("warm start in the exact basin") {
    const WeightedGraph p3(3, {{0, 1, 1}, {1, 2, 1}});
    DescentConfig cfg;
    cfg.restarts = 1;
    cfg.seed = 1;
    const Matrix x0 = Matrix::from_rows({{0.05}, {0.93}, {2.1}});
    const auto res = dg::solve_quartic(p3, 1, cfg, x0);
    CHECK(res.report.final_objective < 1e-12);
    CHECK(res.report.method == "qrt");
    CHECK(res.report.max_violation < 1e-6);
  }
  SUBCASE("unit four-cycle in the plane") {
    DescentConfig cfg;
    cfg.seed = 2024;
    const auto res = dg::solve_quartic(kUnitSquareCycle, 2, cfg);
    CHECK(res.report.final_objective < 1e-10);
    CHECK(res.report.restart_objectives.size() == 10);
  }
  SUBCASE("infeasible instance reports a positive objective without throwing") {
    const WeightedGraph bad(4, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}, {1, 2, 1}, {1, 3, 1},
                                {2, 3, 10}});
    DescentConfig cfg;
    cfg.seed = 7;
    cfg.restarts = 4;
    const auto res = dg::solve_quartic(bad, 2, cfg);
    CHECK(res.report.final_objective > 1.0);
    CHECK(res.report.max_violation > 0.1);
  }
  SUBCASE("descent from a warm start never ends above the start") {
    dg::Rng rng(79);
    const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 2.5}});
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix x0 = random_points(4, 2, rng);
      DescentConfig cfg;
      cfg.restarts = 1;
      cfg.seed = 55 + trial;
      const auto res = dg::solve_quartic(g, 2, cfg, x0);
      CHECK(res.report.final_objective <= dg::quartic_objective(g, x0) + 1e-12);
    }
  }
}

TEST_CASE("interval merit function") {
  const WeightedGraph k2(2, {{0, 1, 1}});
  SUBCASE("feasible points score zero") {
    std::vector<dg::IntervalBound> b = {{1.0, 2.0}};
    const Matrix x = Matrix::from_rows({{0.0}, {1.5}});
    CHECK(dg::interval_objective(k2, b, x) == 0.0);
    CHECK(max_abs(dg::interval_subgradient(k2, b, x)) == 0.0);
  }
  SUBCASE("upper-bound overshoot") {
    std::vector<dg::IntervalBound> b = {{1.0, 2.0}};
    const Matrix x = Matrix::from_rows({{0.0}, {3.0}});
    CHECK(dg::interval_objective(k2, b, x) == doctest::Approx(5.0));  // 9 - 4
  }
  SUBCASE("collapsed interval equals the absolute squared-distance error") {
    dg::Rng rng(83);
    const WeightedGraph g(3, {{0, 1, 1}, {1, 2, 0.5}, {0, 2, 1.2}});
    std::vector<dg::IntervalBound> b;
    for (const auto& e : g.edges()) b.push_back({e.w, e.w});
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix x = random_points(3, 2, rng);
      double want = 0.0;
      for (const auto& e : g.edges())
        want += std::fabs(row_sqdist(x, e.u, e.v) - e.w * e.w);
      CHECK(dg::interval_objective(g, b, x) == doctest::Approx(want).epsilon(1e-12));
    }
  }
  SUBCASE("subgradient matches finite differences away from kinks") {
    dg::Rng rng(89);
    const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}});
    std::vector<dg::IntervalBound> b = {{0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}};
    int checked = 0;
    for (int trial = 0; trial < 200 && checked < 100; ++trial) {
      const Matrix x = random_points(4, 2, rng);
      // Skip points within FD reach of a kink of any edge term.
      bool near_kink = false;
      for (std::size_t e = 0; e < b.size(); ++e) {
        const double s = row_sqdist(x, g.edges()[e].u, g.edges()[e].v);
        if (std::fabs(s - b[e].lo * b[e].lo) < 1e-4 || std::fabs(s - b[e].hi * b[e].hi) < 1e-4)
          near_kink = true;
      }
      if (near_kink) continue;
      ++checked;
      const Matrix analytic = dg::interval_subgradient(g, b, x);
      const Matrix fd =
          fd_gradient([&](const Matrix& p) { return dg::interval_objective(g, b, p); }, x);
      check_gradients_close(analytic, fd, 1e-5);
    }
    CHECK(checked >= 50);
  }
}

TEST_CASE("penalty method is the quartic merit in disguise") {
  const WeightedGraph g(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 1}, {0, 2, 1.41}});
  DescentConfig cfg;
  cfg.seed = 99;
  cfg.restarts = 3;
  const auto a = dg::solve_quartic(g, 2, cfg);
  const auto b = dg::penalty_qcqp_solve(g, 2, cfg);
  CHECK(a.report.final_objective == b.report.final_objective);  // identical trajectory
  CHECK(max_abs(a.x - b.x) == 0.0);
  CHECK(b.report.slack_square_sum == b.report.final_objective);
  CHECK(b.report.method == "penalty");
}

TEST_CASE("push-and-pull stretches edges to their bounds") {
  SUBCASE("single edge settles at its length bound") {
    const WeightedGraph k2(2, {{0, 1, 1}});
    DescentConfig cfg;
    cfg.seed = 5;
    cfg.restarts = 3;
    const auto res = dg::pushpull_solve(k2, 1, cfg);
    const double dist = std::fabs(res.x(0, 0) - res.x(1, 0));
    CHECK(std::fabs(dist - 1.0) <= 1e-4);
    CHECK(res.report.method == "pushpull");
  }
  SUBCASE("chain unfolds when the start straddles the middle vertex") {
    const WeightedGraph p3(3, {{0, 1, 1}, {1, 2, 1}});
    DescentConfig cfg;
    cfg.restarts = 1;
    // Chosen so the endpoints start on opposite sides of the middle vertex;
    // the outward push then separates them by both edge lengths.
    cfg.seed = 3;
    const auto res = dg::pushpull_solve(p3, 1, cfg);
    const double spread = std::fabs(res.x(0, 0) - res.x(2, 0));
    CHECK(spread == doctest::Approx(2.0).epsilon(1e-3));
  }
  SUBCASE("edgeless graph returns immediately with a zero objective") {
    const WeightedGraph empty(3, {});
    DescentConfig cfg;
    cfg.seed = 1;
    cfg.restarts = 2;
    const auto res = dg::pushpull_solve(empty, 2, cfg);
    CHECK(res.report.final_objective == 0.0);
    CHECK(res.report.violations.empty());
  }
}

TEST_CASE("report serialization carries the shared fields") {
  const WeightedGraph k2(2, {{0, 1, 1}});
  DescentConfig cfg;
  cfg.seed = 11;
  cfg.restarts = 2;
  const auto res = dg::solve_quartic(k2, 1, cfg);
  const std::string j = dg::realize_report_to_json(res.report);
  for (const char* key : {"\"method\"", "\"K\"", "\"final_objective\"", "\"max_violation\"",
                          "\"iterations\"", "\"seed\""}) {
    CHECK(j.find(key) != std::string::npos);
  }
}
