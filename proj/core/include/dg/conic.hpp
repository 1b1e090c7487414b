#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dg/graphs.hpp"
#include "dg/matrix.hpp"

namespace dg {

enum class Sense { eq, le, ge };

// Semidefinite program in minimization form:
//   minimize <C, X>  subject to  <A_i, X> (= | <=) b_i,  X PSD.
struct SdpConstraint {
  Matrix a;
  Sense sense = Sense::eq;  // ge is not used for SDP rows
  double b = 0.0;
};

struct SdpProblem {
  std::size_t n = 0;
  Matrix c;
  std::vector<SdpConstraint> constraints;
};

struct SdpResult {
  Matrix x;                      // PSD within 1e-7
  double objective = 0.0;        // <C, x>
  double primal_residual = 0.0;  // worst constraint violation at x
  double consensus_residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Operator-splitting solver: alternates a least-squares projection onto the
// affine constraint set with a projection onto the PSD cone, with scaled dual
// updates. Never throws on non-convergence: the best iterate is returned with
// converged=false.
SdpResult admm_sdp_solve(const SdpProblem& p, double tol = 1e-7, std::size_t max_iter = 20000);

// Distance-geometry SDP relaxations. Constraint per edge on
// <A_uv, X> = X_uu + X_vv - 2 X_uv:
//   trace:    minimize tr(X)        with equality edge constraints
//   pushpull: maximize sum of edge terms with <= edge constraints
//   mixed:    maximize (sum of edge terms) - gamma*tr(X), <= constraints
// Everything is posed in minimization form (maximization negates C).
enum class DgpSdpObjective { trace, pushpull, mixed };
SdpProblem dgp_sdp(const WeightedGraph& g, DgpSdpObjective objective, double gamma = 0.01);

// Value of the push-and-pull objective at a candidate Gram matrix.
double pushpull_value(const WeightedGraph& g, const Matrix& x);

// Euclidean distance matrix completion. Alternates (i) projecting the
// centered transform of the current squared-distance guess onto the PSD cone
// and (ii) refreshing unknown entries from the projected Gram matrix.
// A (near-)zero objective certifies the instance completable; the realization
// is then available through realization_from_gram on `gram`.
struct EdmcpResult {
  Matrix gram;        // PSD
  Matrix completed;   // completed squared-distance matrix
  double objective = 0.0;  // entrywise l1 mismatch between the two views
  std::size_t iterations = 0;
  bool converged = false;
};
EdmcpResult edmcp_sdp_solve(const PartialDistanceMatrix& pdm, double tol = 1e-8,
                            std::size_t max_iter = 5000);

// Dense linear programming.
struct LpRow {
  std::vector<double> coeffs;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

struct LpProblem {
  std::size_t vars = 0;
  bool maximize = false;
  std::vector<double> objective;
  std::vector<LpRow> rows;
  // Per-variable bounds; +/-infinity allowed (free variables are split
  // internally).
  std::vector<double> lower;
  std::vector<double> upper;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  std::vector<double> x;
  double objective = 0.0;
  LpStatus status = LpStatus::optimal;
};

// Two-phase dense simplex with Bland's anti-cycling rule throughout.
LpResult simplex_solve(const LpProblem& p);

// Diagonally-dominant inner approximation of the distance SDP: maximize the
// sum of edge terms subject to per-edge upper bounds and diagonal dominance
// certified by auxiliary variables T (sum_j T_ij <= X_ii, |X_ij| <= T_ij).
// Variables: upper-triangle of X (free), then strictly-upper T (nonnegative).
LpProblem ddp_primal(const WeightedGraph& g);

// Outer approximation from the dual cone generators {e_i} and {e_i +/- e_j}:
// equality edge constraints with X_ii >= 0 and X_ii + X_jj +/- 2 X_ij >= 0.
// Solutions need not be PSD.
LpProblem ddp_dual(const WeightedGraph& g);

struct DdpResult {
  LpResult lp;
  Matrix x;  // symmetric matrix rebuilt from the LP solution
  double edge_objective = 0.0;  // sum of edge terms at the solution
  std::vector<double> eigenvalues;
  std::vector<double> negative_eigenvalues;  // entries < -1e-9
};

DdpResult ddp_primal_solve(const WeightedGraph& g);
DdpResult ddp_dual_solve(const WeightedGraph& g);

std::string sdp_result_to_json(const SdpResult& r);
std::string lp_result_to_json(const LpResult& r);
std::string ddp_result_to_json(const DdpResult& r);

}  // namespace dg
