#include "dg/realize.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <nlohmann/json.hpp>

#include "dg/error.hpp"
#include "dg/rng.hpp"

namespace dg {
namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr double kMinStep = 1e-18;
constexpr double kIterateBound = 1e9;

void check_shape(const WeightedGraph& g, const Matrix& x, const char* op) {
  require(x.rows() == g.vertex_count(), errc::dimension_mismatch, op,
          "realization must have one row per vertex");
  require(x.cols() >= 1, errc::dimension_mismatch, op, "realization needs at least one column");
}

double grad_norm(const Matrix& g) { return frobenius_norm(g); }

struct DescentOutcome {
  Matrix x;
  double f = 0.0;
  std::size_t iterations = 0;
  bool unbounded = false;
};

// Gradient descent with Armijo backtracking (sufficient decrease with slope
// 1e-4, step halving). Objective and Gradient are callables on Matrix.
template <typename Objective, typename Gradient>
DescentOutcome descend(Objective&& objective, Gradient&& gradient, Matrix x,
                       const DescentConfig& cfg) {
  DescentOutcome out;
  double f = objective(x);
  double step = 1.0;
  std::size_t it = 0;
  for (; it < cfg.max_iterations; ++it) {
    const Matrix g = gradient(x);
    const double gn = grad_norm(g);
    if (gn <= cfg.gradient_tolerance) break;
    if (max_abs(x) > kIterateBound) {
      out.unbounded = true;
      break;
    }
    if (cfg.step_rule == DescentConfig::StepRule::fixed) {
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) -= cfg.fixed_step * g(r, c);
      f = objective(x);
      continue;
    }
    // Backtracking line search along -g.
    double t = std::min(1.0, step * 2.0);
    const double gg = gn * gn;
    bool accepted = false;
    while (t >= kMinStep) {
      Matrix trial = x;
      for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) trial(r, c) -= t * g(r, c);
      const double ft = objective(trial);
      if (ft <= f - kArmijoSlope * t * gg) {
        x = std::move(trial);
        f = ft;
        step = t;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no descent step exists at double precision
  }
  out.x = std::move(x);
  out.f = f;
  out.iterations = it;
  return out;
}

Matrix random_start(std::size_t n, std::size_t k, double radius, Rng& rng) {
  Matrix x(n, k);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) x(i, j) = rng.uniform(-radius, radius);
  return x;
}

double start_radius(const WeightedGraph& g) {
  const double r = g.max_weight();
  return r > 0.0 ? r : 1.0;
}

// Largest |distance - weight| over edges.
double equality_violation(const WeightedGraph& g, const Matrix& x) {
  double worst = 0.0;
  for (const Edge& e : g.edges()) {
    const double dist = std::sqrt(row_sqdist(x, e.u, e.v));
    worst = std::max(worst, std::fabs(dist - e.w));
  }
  return worst;
}

RealizeResult run_quartic(const WeightedGraph& g, std::size_t k, const DescentConfig& cfg,
                          const std::optional<Matrix>& x0, const char* method) {
  const char* op = "realize.solve_quartic";
  require(k >= 1, errc::bad_value, op, "dimension must be at least 1");
  require(cfg.restarts >= 1, errc::bad_value, op, "need at least one restart");
  require(cfg.gradient_tolerance > 0.0, errc::bad_value, op, "tolerance must be positive");
  if (x0.has_value()) check_shape(g, *x0, op);
  const std::size_t n = g.vertex_count();
  const double radius = start_radius(g);

  const auto objective = [&](const Matrix& x) { return quartic_objective(g, x); };
  const auto gradient = [&](const Matrix& x) { return quartic_gradient(g, x); };

  RealizeResult best;
  best.report.method = method;
  best.report.dimension = k;
  best.report.seed = cfg.seed;
  Rng root(cfg.seed);
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng stream = root.split(r);
    Matrix start = (r == 0 && x0.has_value()) ? *x0 : random_start(n, k, radius, stream);
    if (x0.has_value() && r == 0 && x0->cols() != k) {
      // Width mismatch between a seed realization and the requested
      // dimension: copy the overlapping columns, leave the rest zero.
      start = Matrix(n, k);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < std::min(k, x0->cols()); ++c) start(i, c) = (*x0)(i, c);
    }
    DescentOutcome run = descend(objective, gradient, std::move(start), cfg);
    best.report.restart_objectives.push_back(run.f);
    const bool better = best.x.rows() == 0 || run.f < best.report.final_objective;
    if (better) {
      best.x = std::move(run.x);
      best.report.final_objective = run.f;
      best.report.iterations = run.iterations;
      best.report.unbounded = run.unbounded;
    }
  }
  best.report.max_violation = equality_violation(g, best.x);
  return best;
}

}  // namespace

double quartic_objective(const WeightedGraph& g, const Matrix& x) {
  check_shape(g, x, "realize.quartic_objective");
  double f = 0.0;
  for (const Edge& e : g.edges()) {
    const double r = row_sqdist(x, e.u, e.v) - e.w * e.w;
    f += r * r;
  }
  return f;
}

Matrix quartic_gradient(const WeightedGraph& g, const Matrix& x) {
  check_shape(g, x, "realize.quartic_gradient");
  Matrix grad(x.rows(), x.cols());
  for (const Edge& e : g.edges()) {
    const double r = row_sqdist(x, e.u, e.v) - e.w * e.w;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double diff = x(e.u, c) - x(e.v, c);
      grad(e.u, c) += 4.0 * r * diff;
      grad(e.v, c) -= 4.0 * r * diff;
    }
  }
  return grad;
}

RealizeResult solve_quartic(const WeightedGraph& g, std::size_t k, const DescentConfig& cfg,
                            const std::optional<Matrix>& x0) {
  return run_quartic(g, k, cfg, x0, "qrt");
}

double interval_objective(const WeightedGraph& g, const std::vector<IntervalBound>& bounds,
                          const Matrix& x) {
  const char* op = "realize.interval_objective";
  check_shape(g, x, op);
  require(bounds.size() == g.edge_count(), errc::dimension_mismatch, op,
          "need one interval per edge");
  double f = 0.0;
  for (std::size_t e = 0; e < bounds.size(); ++e) {
    const auto& edge = g.edges()[e];
    const auto& b = bounds[e];
    require(0.0 <= b.lo && b.lo <= b.hi, errc::bad_value, op,
            "intervals must satisfy 0 <= lo <= hi");
    const double s = row_sqdist(x, edge.u, edge.v);
    f += std::max(0.0, b.lo * b.lo - s) + std::max(0.0, s - b.hi * b.hi);
  }
  return f;
}

Matrix interval_subgradient(const WeightedGraph& g, const std::vector<IntervalBound>& bounds,
                            const Matrix& x) {
  const char* op = "realize.interval_subgradient";
  check_shape(g, x, op);
  require(bounds.size() == g.edge_count(), errc::dimension_mismatch, op,
          "need one interval per edge");
  Matrix grad(x.rows(), x.cols());
  for (std::size_t e = 0; e < bounds.size(); ++e) {
    const auto& edge = g.edges()[e];
    const auto& b = bounds[e];
    const double s = row_sqdist(x, edge.u, edge.v);
    double slope = 0.0;  // d/ds of the active piece; 0 inside the interval
    if (s < b.lo * b.lo) slope = -1.0;
    if (s > b.hi * b.hi) slope = 1.0;
    if (slope == 0.0) continue;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double diff = x(edge.u, c) - x(edge.v, c);
      grad(edge.u, c) += slope * 2.0 * diff;
      grad(edge.v, c) -= slope * 2.0 * diff;
    }
  }
  return grad;
}

RealizeResult penalty_qcqp_solve(const WeightedGraph& g, std::size_t k,
                                 const DescentConfig& cfg) {
  RealizeResult res = run_quartic(g, k, cfg, std::nullopt, "penalty");
  // With slacks defined as s_uv = ||x_u - x_v||^2 - d_uv^2, the penalty
  // objective equals the quartic merit, so the slack square sum is the final
  // objective itself.
  res.report.slack_square_sum = res.report.final_objective;
  return res;
}

RealizeResult pushpull_solve(const WeightedGraph& g, std::size_t k, const DescentConfig& cfg,
                             double mu0) {
  const char* op = "realize.pushpull_solve";
  require(k >= 1, errc::bad_value, op, "dimension must be at least 1");
  require(mu0 > 0.0, errc::bad_value, op, "initial penalty must be positive");
  require(cfg.restarts >= 1, errc::bad_value, op, "need at least one restart");
  const std::size_t n = g.vertex_count();
  const double radius = start_radius(g);
  constexpr int kRounds = 5;

  const auto make_objective = [&](double mu) {
    return [&, mu](const Matrix& x) {
      double f = 0.0;
      for (const Edge& e : g.edges()) {
        const double s = row_sqdist(x, e.u, e.v);
        const double over = std::max(0.0, s - e.w * e.w);
        f += -s + mu * over * over;
      }
      return f;
    };
  };
  const auto make_gradient = [&](double mu) {
    return [&, mu](const Matrix& x) {
      Matrix grad(x.rows(), x.cols());
      for (const Edge& e : g.edges()) {
        const double s = row_sqdist(x, e.u, e.v);
        const double over = std::max(0.0, s - e.w * e.w);
        const double coef = -2.0 + 4.0 * mu * over;
        for (std::size_t c = 0; c < x.cols(); ++c) {
          const double diff = x(e.u, c) - x(e.v, c);
          grad(e.u, c) += coef * diff;
          grad(e.v, c) -= coef * diff;
        }
      }
      return grad;
    };
  };

  RealizeResult best;
  best.report.method = "pushpull";
  best.report.dimension = k;
  best.report.seed = cfg.seed;
  Rng root(cfg.seed);
  bool have = false;
  for (std::size_t r = 0; r < cfg.restarts; ++r) {
    Rng stream = root.split(r);
    Matrix x = random_start(n, k, radius, stream);
    std::size_t iterations = 0;
    bool unbounded = false;
    double mu = mu0;
    double f = 0.0;
    for (int round = 0; round < kRounds; ++round) {
      DescentOutcome run = descend(make_objective(mu), make_gradient(mu), std::move(x), cfg);
      x = std::move(run.x);
      f = run.f;
      iterations += run.iterations;
      unbounded = unbounded || run.unbounded;
      mu *= 10.0;
    }
    if (!have || f < best.report.final_objective) {
      have = true;
      best.x = x;
      best.report.final_objective = f;
      best.report.iterations = iterations;
      best.report.unbounded = unbounded;
    }
    best.report.restart_objectives.push_back(f);
  }
  for (const Edge& e : g.edges()) {
    const double over = std::max(0.0, row_sqdist(best.x, e.u, e.v) - e.w * e.w);
    best.report.max_violation = std::max(best.report.max_violation, over);
    if (over > 1e-6) best.report.violations.push_back(over);
  }
  return best;
}

std::string realize_report_to_json(const RealizeReport& report) {
  nlohmann::json j;
  j["method"] = report.method;
  j["K"] = report.dimension;
  j["final_objective"] = report.final_objective;
  j["max_violation"] = report.max_violation;
  j["iterations"] = report.iterations;
  j["seed"] = report.seed;
  if (!report.violations.empty()) j["violations"] = report.violations;
  return j.dump(2) + "\n";
}

}  // namespace dg
