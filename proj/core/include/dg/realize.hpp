#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dg/graphs.hpp"
#include "dg/matrix.hpp"

namespace dg {

struct DescentConfig {
  std::size_t max_iterations = 5000;   // per descent run
  double gradient_tolerance = 1e-10;   // stop when the gradient norm drops below
  std::size_t restarts = 10;
  enum class StepRule { fixed, backtracking } step_rule = StepRule::backtracking;
  double fixed_step = 1e-3;  // used only by the fixed rule
  std::uint64_t seed = 0;
};

// Per-edge distance interval, parallel to WeightedGraph::edges().
struct IntervalBound {
  double lo = 0.0;
  double hi = 0.0;
};

struct RealizeReport {
  std::string method;
  std::size_t dimension = 0;
  double final_objective = 0.0;
  // Largest edge violation: |dist - d| for equality instances, positive
  // overshoot of the upper bound for push-and-pull.
  double max_violation = 0.0;
  std::size_t iterations = 0;  // descent iterations of the winning restart
  std::uint64_t seed = 0;
  std::vector<double> restart_objectives;  // final objective of every restart
  std::vector<double> violations;          // push-and-pull overshoots > 1e-6
  double slack_square_sum = 0.0;           // penalty method: sum of squared slacks
  bool unbounded = false;                  // iterates escaped the sanity box
};

struct RealizeResult {
  Matrix x;
  RealizeReport report;
};

// Smooth merit function for equality-constrained realization:
// f(x) = sum over edges of (||x_u - x_v||^2 - d_uv^2)^2, with its analytic
// gradient.
double quartic_objective(const WeightedGraph& g, const Matrix& x);
Matrix quartic_gradient(const WeightedGraph& g, const Matrix& x);

// Multi-restart gradient descent (Armijo backtracking) on the merit function.
// If x0 is given it seeds the first restart; remaining restarts start
// uniformly in [-r, r]^(n*k) with r the largest edge weight (1 if edgeless).
// The best restart wins; ties go to the lowest restart index.
RealizeResult solve_quartic(const WeightedGraph& g, std::size_t k, const DescentConfig& cfg,
                            const std::optional<Matrix>& x0 = std::nullopt);

// One-sided interval merit: sum of max(0, lo^2 - s) + max(0, s - hi^2) over
// edges, where s is the squared distance. Zero exactly on interval-feasible
// realizations. The subgradient picks 0 at kinks.
double interval_objective(const WeightedGraph& g, const std::vector<IntervalBound>& bounds,
                          const Matrix& x);
Matrix interval_subgradient(const WeightedGraph& g, const std::vector<IntervalBound>& bounds,
                            const Matrix& x);

// Penalty form with explicit slacks s_uv eliminated algebraically
// (s_uv := ||x_u - x_v||^2 - d_uv^2), which makes the objective identical to
// the quartic merit; the report records the slack square sum.
RealizeResult penalty_qcqp_solve(const WeightedGraph& g, std::size_t k,
                                 const DescentConfig& cfg);

// Push-and-pull: maximize the total squared edge length subject to
// ||x_u - x_v||^2 <= d_uv^2, handled by an increasing quadratic penalty
// (5 rounds, mu multiplied by 10 each round).
RealizeResult pushpull_solve(const WeightedGraph& g, std::size_t k, const DescentConfig& cfg,
                             double mu0 = 1.0);

// Serializes {method, K, final_objective, max_violation, iterations, seed};
// a "violations" array is appended when the method produced any.
std::string realize_report_to_json(const RealizeReport& report);

}  // namespace dg
