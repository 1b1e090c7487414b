#include "dg/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <nlohmann/json.hpp>

#include "dg/error.hpp"
#include "dg/linalg.hpp"

namespace dg {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNoCol = static_cast<std::size_t>(-1);

Matrix checked_symmetric(const Matrix& a, std::size_t n, const char* op, const char* what) {
  require(a.rows() == n && a.cols() == n, errc::dimension_mismatch, op,
          std::string(what) + " must be n x n");
  require(all_finite(a), errc::bad_value, op, std::string(what) + " has non-finite entries");
  const double scale = std::max(1.0, max_abs(a));
  require(asymmetry(a) <= 1e-10 * scale, errc::not_symmetric, op,
          std::string(what) + " must be symmetric");
  return symmetrized(a);
}

// Dense Cholesky factorization (in place, lower triangle) and solve.
void cholesky_factor(Matrix& h, const char* op) {
  const std::size_t n = h.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = h(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= h(j, k) * h(j, k);
    require(d > 0.0, errc::bad_value, op, "constraint normal matrix is not positive definite");
    h(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = h(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= h(i, k) * h(j, k);
      h(i, j) = s / h(j, j);
    }
  }
}

void cholesky_solve(const Matrix& l, std::vector<double>& rhs) {
  const std::size_t n = l.rows();
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * rhs[k];
    rhs[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = rhs[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * rhs[k];
    rhs[ii] = s / l(ii, ii);
  }
}

Matrix edge_constraint_matrix(std::size_t n, std::size_t u, std::size_t v) {
  Matrix a(n, n);
  a(u, u) = 1.0;
  a(v, v) = 1.0;
  a(u, v) = a(v, u) = -1.0;
  return a;
}

}  // namespace

SdpResult admm_sdp_solve(const SdpProblem& p, double tol, std::size_t max_iter) {
  const char* op = "conic.admm_sdp_solve";
  const std::size_t n = p.n;
  require(n >= 1, errc::empty_input, op, "dimension must be at least 1");
  require(tol > 0.0, errc::bad_value, op, "tolerance must be positive");
  const Matrix c = checked_symmetric(p.c, n, op, "objective matrix");

  const std::size_t m = p.constraints.size();
  std::vector<Matrix> rows;
  std::vector<double> b(m);
  std::vector<char> is_le(m, 0);
  rows.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& con = p.constraints[i];
    require(con.sense != Sense::ge, errc::bad_value, op,
            "SDP rows use = or <= (flip signs for >=)");
    rows.push_back(checked_symmetric(con.a, n, op, "constraint matrix"));
    require(std::isfinite(con.b), errc::bad_value, op, "right-hand side must be finite");
    b[i] = con.b;
    is_le[i] = con.sense == Sense::le ? 1 : 0;
  }

  // Gram matrix of the constraint normals, plus the identity block coming
  // from the slack variables of <= rows.
  Matrix h(std::max<std::size_t>(m, 1), std::max<std::size_t>(m, 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) h(i, j) = h(j, i) = frob_dot(rows[i], rows[j]);
    if (is_le[i]) h(i, i) += 1.0;
    h(i, i) += 1e-10 * std::max(1.0, h(i, i));  // ridge against redundant rows
  }
  if (m > 0) cholesky_factor(h, op);

  Matrix z(n, n);
  Matrix u(n, n);
  std::vector<double> s(m, 0.0), t(m, 0.0), v(m, 0.0);
  double rho = 1.0;
  SdpResult res;

  const auto violation_at = [&](const Matrix& zz) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double val = frob_dot(rows[i], zz) - b[i];
      worst = std::max(worst, is_le[i] ? std::max(0.0, val) : std::fabs(val));
    }
    return worst;
  };

  Matrix x(n, n);
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    // Projection of (Z - U - C/rho, t - v) onto the affine constraint set.
    Matrix w = z - u;
    for (std::size_t i = 0; i < n * n; ++i) w.data()[i] -= c.data()[i] / rho;
    std::vector<double> lambda(m);
    for (std::size_t i = 0; i < m; ++i) {
      lambda[i] = frob_dot(rows[i], w) - b[i];
      if (is_le[i]) lambda[i] += t[i] - v[i];
    }
    if (m > 0) cholesky_solve(h, lambda);
    x = w;
    for (std::size_t i = 0; i < m; ++i) {
      if (lambda[i] == 0.0) continue;
      for (std::size_t e = 0; e < n * n; ++e)
        x.data()[e] -= lambda[i] * rows[i].data()[e];
    }
    for (std::size_t i = 0; i < m; ++i) s[i] = is_le[i] ? (t[i] - v[i]) - lambda[i] : 0.0;

    // Cone projections.
    const Matrix z_prev = z;
    z = psd_project(x + u);
    double dual_sq = 0.0;
    {
      const Matrix dz = z - z_prev;
      dual_sq += frob_dot(dz, dz);
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_le[i]) continue;
      const double tn = std::max(0.0, s[i] + v[i]);
      dual_sq += (tn - t[i]) * (tn - t[i]);
      t[i] = tn;
    }

    // Scaled dual updates.
    double primal_sq = 0.0;
    {
      const Matrix dx = x - z;
      u = u + dx;
      primal_sq += frob_dot(dx, dx);
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_le[i]) continue;
      const double d = s[i] - t[i];
      v[i] += d;
      primal_sq += d * d;
    }

    const double pr = std::sqrt(primal_sq);
    const double du = rho * std::sqrt(dual_sq);

    double consensus = max_abs(x - z);
    for (std::size_t i = 0; i < m; ++i)
      if (is_le[i]) consensus = std::max(consensus, std::fabs(s[i] - t[i]));
    const double viol = violation_at(z);
    if (consensus <= tol && viol <= tol) {
      res.converged = true;
      ++it;
      break;
    }

    // Residual balancing keeps the two projection sequences in step.
    if (it >= 10 && it % 25 == 0) {
      if (pr > 10.0 * du && rho < 1e6) {
        rho *= 2.0;
        u = 0.5 * u;
        for (double& vi : v) vi *= 0.5;
      } else if (du > 10.0 * pr && rho > 1e-6) {
        rho *= 0.5;
        u = 2.0 * u;
        for (double& vi : v) vi *= 2.0;
      }
    }
  }

  res.x = z;
  res.objective = frob_dot(c, z);
  res.primal_residual = violation_at(z);
  res.consensus_residual = max_abs(x - z);
  res.iterations = it;
  return res;
}

SdpProblem dgp_sdp(const WeightedGraph& g, DgpSdpObjective objective, double gamma) {
  const char* op = "conic.dgp_sdp";
  require(gamma >= 0.0, errc::bad_value, op, "gamma must be nonnegative");
  const std::size_t n = g.vertex_count();
  SdpProblem p;
  p.n = n;
  p.c = Matrix(n, n);
  const bool equality = objective == DgpSdpObjective::trace;
  for (const Edge& e : g.edges()) {
    SdpConstraint con;
    con.a = edge_constraint_matrix(n, e.u, e.v);
    con.sense = equality ? Sense::eq : Sense::le;
    con.b = e.w * e.w;
    p.constraints.push_back(std::move(con));
  }
  switch (objective) {
    case DgpSdpObjective::trace:
      p.c = Matrix::identity(n);
      break;
    case DgpSdpObjective::pushpull:
    case DgpSdpObjective::mixed: {
      // Maximization posed as minimization: C = -sum of edge matrices
      // (+ gamma I for the mixed form; gamma = 0 recovers push-and-pull).
      for (const Edge& e : g.edges()) {
        p.c(e.u, e.u) -= 1.0;
        p.c(e.v, e.v) -= 1.0;
        p.c(e.u, e.v) += 1.0;
        p.c(e.v, e.u) += 1.0;
      }
      if (objective == DgpSdpObjective::mixed) {
        for (std::size_t i = 0; i < n; ++i) p.c(i, i) += gamma;
      }
      break;
    }
  }
  return p;
}

double pushpull_value(const WeightedGraph& g, const Matrix& x) {
  require(x.rows() == g.vertex_count() && x.cols() == g.vertex_count(),
          errc::dimension_mismatch, "conic.pushpull_value", "matrix must be n x n");
  double total = 0.0;
  for (const Edge& e : g.edges()) total += x(e.u, e.u) + x(e.v, e.v) - 2.0 * x(e.u, e.v);
  return total;
}

namespace {
EdmcpResult make_edmcp_result(Matrix gram, Matrix completed, double obj, std::size_t it,
                              bool conv) {
  EdmcpResult r;
  r.gram = std::move(gram);
  r.completed = std::move(completed);
  r.objective = obj;
  r.iterations = it;
  r.converged = conv;
  return r;
}
}  // namespace

namespace {

// Double centering: -1/2 J A J with J = I - (1/n) 11^T.
Matrix double_center(const Matrix& a) {
  const std::size_t n = a.rows();
  std::vector<double> rowmean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) rowmean[i] += a(i, j);
    total += rowmean[i];
    rowmean[i] /= static_cast<double>(n);
  }
  total /= static_cast<double>(n) * static_cast<double>(n);
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out(i, j) = -0.5 * (a(i, j) - rowmean[i] - rowmean[j] + total);
  return out;
}

}  // namespace

EdmcpResult edmcp_sdp_solve(const PartialDistanceMatrix& pdm, double tol,
                            std::size_t max_iter) {
  const char* op = "conic.edmcp_sdp_solve";
  require(tol > 0.0, errc::bad_value, op, "tolerance must be positive");
  const std::size_t n = pdm.size();
  require(n >= 1, errc::empty_input, op, "need at least one point");
  if (n == 1) return make_edmcp_result(Matrix(1, 1), Matrix(1, 1), 0.0, 0, true);

  std::vector<std::pair<std::size_t, std::size_t>> unknown;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (!pdm.known(i, j)) unknown.push_back({i, j});
  const std::size_t m = unknown.size();

  // Initial squared-distance guess: shortest-path completion when the known
  // pairs connect the points, otherwise the largest known distance.
  Matrix delta(n, n);
  {
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (pdm.known(i, j)) edges.push_back({i, j, pdm.value(i, j)});
    const WeightedGraph known(n, std::move(edges));
    if (known.connected()) {
      const Matrix d = floyd_warshall_complete(pdm);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) delta(i, j) = d(i, j) * d(i, j);
    } else {
      const double dmax = known.max_weight();
      const double fill = (dmax > 0.0 ? dmax : 1.0) * (dmax > 0.0 ? dmax : 1.0);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          delta(i, j) = i == j ? 0.0
                      : pdm.known(i, j) ? pdm.value(i, j) * pdm.value(i, j)
                                        : fill;
    }
  }

  // The centered image of the fixed entries, and an orthonormal-free basis of
  // the centered images of the unknown ones. Fitting the free entries in
  // least squares makes the loop an alternating projection between the PSD
  // cone and this affine subspace.
  Matrix fixed_part = delta;
  for (const auto& [i, j] : unknown) fixed_part(i, j) = fixed_part(j, i) = 0.0;
  fixed_part = double_center(fixed_part);
  std::vector<Matrix> basis;
  basis.reserve(m);
  for (const auto& [i, j] : unknown) {
    Matrix s(n, n);
    s(i, j) = s(j, i) = 1.0;
    basis.push_back(double_center(s));
  }
  Matrix normal(std::max<std::size_t>(m, 1), std::max<std::size_t>(m, 1));
  for (std::size_t p = 0; p < m; ++p) {
    for (std::size_t q = p; q < m; ++q)
      normal(p, q) = normal(q, p) = frob_dot(basis[p], basis[q]);
    normal(p, p) += 1e-12 * std::max(1.0, normal(p, p));
  }
  if (m > 0) cholesky_factor(normal, op);

  Matrix gram(n, n);
  double objective = kInf;
  std::size_t it = 0;
  for (; it < max_iter; ++it) {
    const Matrix centered = double_center(delta);
    gram = psd_project(centered);
    double obj = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) obj += std::fabs(gram(i, j) - centered(i, j));
    const bool stalled = std::fabs(objective - obj) <= 1e-15 * std::max(1.0, obj);
    objective = obj;
    if (obj <= tol || stalled) break;
    // Least-squares refit of the free entries against the projected matrix.
    if (m == 0) continue;
    const Matrix target = gram - fixed_part;
    std::vector<double> coef(m);
    for (std::size_t p = 0; p < m; ++p) coef[p] = frob_dot(basis[p], target);
    cholesky_solve(normal, coef);
    for (std::size_t p = 0; p < m; ++p) {
      const auto& [i, j] = unknown[p];
      delta(i, j) = delta(j, i) = std::max(0.0, coef[p]);
    }
  }
  return make_edmcp_result(std::move(gram), std::move(delta), objective,
                           std::min(it + 1, max_iter), objective <= tol);
}

// ---------------------------------------------------------------------------
// Dense two-phase simplex with Bland's rule.

namespace {

struct Tableau {
  std::size_t m = 0;  // constraint rows
  std::size_t n = 0;  // columns (variables), excluding rhs
  std::vector<double> a;  // (m+1) x (n+1); row m is the cost row
  std::vector<std::size_t> basis;

  double& at(std::size_t i, std::size_t j) { return a[i * (n + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * (n + 1) + j]; }
  double& rhs(std::size_t i) { return a[i * (n + 1) + n]; }
  double rhs(std::size_t i) const { return a[i * (n + 1) + n]; }

  void pivot(std::size_t r, std::size_t c) {
    const double piv = at(r, c);
    for (std::size_t j = 0; j <= n; ++j) at(r, j) /= piv;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) at(i, j) -= f * at(r, j);
    }
    basis[r] = c;
  }

  void load_costs(const std::vector<double>& cost) {
    for (std::size_t j = 0; j < n; ++j) at(m, j) = cost[j];
    rhs(m) = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double cb = cost[basis[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= n; ++j) at(m, j) -= cb * at(i, j);
    }
  }

  // Bland's rule: smallest eligible entering column, ties in the ratio test
  // broken by the smallest basic variable index. Returns false on
  // unboundedness.
  bool iterate(const std::vector<char>& allowed) {
    constexpr double kCostEps = 1e-9;
    constexpr double kPivotEps = 1e-9;
    while (true) {
      std::size_t enter = kNoCol;
      for (std::size_t j = 0; j < n; ++j) {
        if (allowed[j] && at(m, j) < -kCostEps) {
          enter = j;
          break;
        }
      }
      if (enter == kNoCol) return true;
      std::size_t leave = kNoCol;
      double best = kInf;
      for (std::size_t i = 0; i < m; ++i) {
        const double aie = at(i, enter);
        if (aie <= kPivotEps) continue;
        const double ratio = rhs(i) / aie;
        if (ratio < best - 1e-12 ||
            (ratio <= best + 1e-12 && (leave == kNoCol || basis[i] < basis[leave]))) {
          best = ratio;
          leave = i;
        }
      }
      if (leave == kNoCol) return false;
      pivot(leave, enter);
    }
  }
};

}  // namespace

LpResult simplex_solve(const LpProblem& p) {
  const char* op = "conic.simplex_solve";
  const std::size_t nv = p.vars;
  require(p.objective.size() == nv, errc::dimension_mismatch, op,
          "objective length must match the variable count");
  std::vector<double> lower = p.lower.empty() ? std::vector<double>(nv, -kInf) : p.lower;
  std::vector<double> upper = p.upper.empty() ? std::vector<double>(nv, kInf) : p.upper;
  require(lower.size() == nv && upper.size() == nv, errc::dimension_mismatch, op,
          "bound arrays must match the variable count");
  for (std::size_t j = 0; j < nv; ++j)
    require(lower[j] <= upper[j], errc::bad_value, op, "lower bound exceeds upper bound");
  for (const LpRow& row : p.rows)
    require(row.coeffs.size() == nv, errc::dimension_mismatch, op,
            "row width must match the variable count");

  // Substitutions to nonnegative variables y:
  //   finite lower:   x = l + y          (finite upper becomes a <= row)
  //   upper only:     x = u - y
  //   free:           x = y_plus - y_minus
  struct VarMap {
    std::size_t col_plus = kNoCol;
    std::size_t col_minus = kNoCol;
    double shift = 0.0;
    bool negated = false;
  };
  std::vector<VarMap> vmap(nv);
  std::size_t ycols = 0;
  std::vector<LpRow> extra_rows;
  for (std::size_t j = 0; j < nv; ++j) {
    VarMap& vm = vmap[j];
    if (lower[j] > -kInf) {
      vm.col_plus = ycols++;
      vm.shift = lower[j];
      if (upper[j] < kInf) {
        LpRow r;
        r.coeffs.assign(nv, 0.0);
        r.coeffs[j] = 1.0;
        r.sense = Sense::le;
        r.rhs = upper[j];
        extra_rows.push_back(std::move(r));
      }
    } else if (upper[j] < kInf) {
      vm.col_plus = ycols++;
      vm.shift = upper[j];
      vm.negated = true;
    } else {
      vm.col_plus = ycols++;
      vm.col_minus = ycols++;
    }
  }

  std::vector<LpRow> all_rows = p.rows;
  all_rows.insert(all_rows.end(), extra_rows.begin(), extra_rows.end());
  const std::size_t m = all_rows.size();
  const std::size_t nslack =
      static_cast<std::size_t>(std::count_if(all_rows.begin(), all_rows.end(),
                                             [](const LpRow& r) { return r.sense != Sense::eq; }));
  const std::size_t ncols = ycols + nslack + m;  // + artificials

  Tableau tb;
  tb.m = m;
  tb.n = ncols;
  tb.a.assign((m + 1) * (ncols + 1), 0.0);
  tb.basis.resize(m);

  std::size_t slack_at = ycols;
  for (std::size_t i = 0; i < m; ++i) {
    const LpRow& row = all_rows[i];
    double rhs = row.rhs;
    for (std::size_t j = 0; j < nv; ++j) {
      const double aj = row.coeffs[j];
      if (aj == 0.0) continue;
      rhs -= aj * vmap[j].shift;
      const double sign = vmap[j].negated ? -aj : aj;
      tb.at(i, vmap[j].col_plus) += sign;
      if (vmap[j].col_minus != kNoCol) tb.at(i, vmap[j].col_minus) -= aj;
    }
    if (row.sense == Sense::le) tb.at(i, slack_at++) = 1.0;
    if (row.sense == Sense::ge) tb.at(i, slack_at++) = -1.0;
    tb.rhs(i) = rhs;
    if (rhs < 0.0) {
      for (std::size_t j = 0; j <= ncols; ++j) tb.at(i, j) = -tb.at(i, j);
    }
    const std::size_t art = ycols + nslack + i;
    tb.at(i, art) = 1.0;
    tb.basis[i] = art;
  }

  // Phase 1: drive the artificial variables to zero.
  std::vector<double> phase1(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) phase1[ycols + nslack + i] = 1.0;
  std::vector<char> allowed(ncols, 1);
  tb.load_costs(phase1);
  tb.iterate(allowed);  // phase 1 cannot be unbounded (objective >= 0)
  const double infeasibility = -tb.rhs(m);
  LpResult res;
  if (infeasibility > 1e-7) {
    res.status = LpStatus::infeasible;
    return res;
  }
  // Pivot leftover basic artificials out where possible.
  for (std::size_t i = 0; i < m; ++i) {
    if (tb.basis[i] < ycols + nslack) continue;
    for (std::size_t j = 0; j < ycols + nslack; ++j) {
      if (std::fabs(tb.at(i, j)) > 1e-7) {
        tb.pivot(i, j);
        break;
      }
    }
  }
  for (std::size_t j = ycols + nslack; j < ncols; ++j) allowed[j] = 0;

  // Phase 2 on the real objective (internal convention: minimize).
  std::vector<double> cost(ncols, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const double cj = p.maximize ? -p.objective[j] : p.objective[j];
    const double sign = vmap[j].negated ? -cj : cj;
    cost[vmap[j].col_plus] += sign;
    if (vmap[j].col_minus != kNoCol) cost[vmap[j].col_minus] -= cj;
  }
  tb.load_costs(cost);
  if (!tb.iterate(allowed)) {
    res.status = LpStatus::unbounded;
    return res;
  }

  std::vector<double> y(ncols, 0.0);
  for (std::size_t i = 0; i < m; ++i) y[tb.basis[i]] = tb.rhs(i);
  res.x.assign(nv, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const VarMap& vm = vmap[j];
    double value = vm.shift + (vm.negated ? -y[vm.col_plus] : y[vm.col_plus]);
    if (vm.col_minus != kNoCol) value -= y[vm.col_minus];
    res.x[j] = value;
  }
  res.objective = 0.0;
  for (std::size_t j = 0; j < nv; ++j) res.objective += p.objective[j] * res.x[j];
  res.status = LpStatus::optimal;
  return res;
}

// ---------------------------------------------------------------------------
// Diagonally-dominant programs.

namespace {

std::size_t tri_index(std::size_t n, std::size_t i, std::size_t j) {
  // Upper triangle including the diagonal, row-major: (0,0),(0,1)...
  return i * n - i * (i - 1) / 2 + (j - i);
}

std::size_t strict_index(std::size_t n, std::size_t i, std::size_t j) {
  // Strict upper triangle, row-major: (0,1),(0,2)...
  return i * n - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<double> edge_objective_coeffs(const WeightedGraph& g, std::size_t vars) {
  const std::size_t n = g.vertex_count();
  std::vector<double> obj(vars, 0.0);
  for (const Edge& e : g.edges()) {
    obj[tri_index(n, e.u, e.u)] += 1.0;
    obj[tri_index(n, e.v, e.v)] += 1.0;
    obj[tri_index(n, e.u, e.v)] -= 2.0;
  }
  return obj;
}

DdpResult solve_ddp(const WeightedGraph& g, const LpProblem& lp) {
  const std::size_t n = g.vertex_count();
  DdpResult res;
  res.lp = simplex_solve(lp);
  if (res.lp.status != LpStatus::optimal) return res;
  res.x = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      res.x(i, j) = res.x(j, i) = res.lp.x[tri_index(n, i, j)];
  res.edge_objective = pushpull_value(g, res.x);
  if (n > 0) {
    res.eigenvalues = jacobi_eigenvalues(res.x);
    for (double lam : res.eigenvalues)
      if (lam < -1e-9) res.negative_eigenvalues.push_back(lam);
  }
  return res;
}

}  // namespace

LpProblem ddp_primal(const WeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t nx = n * (n + 1) / 2;
  const std::size_t nt = n * (n - 1) / 2;
  LpProblem p;
  p.vars = nx + nt;
  p.maximize = true;
  p.objective = edge_objective_coeffs(g, p.vars);
  p.lower.assign(p.vars, -kInf);
  p.upper.assign(p.vars, kInf);
  for (std::size_t k = nx; k < p.vars; ++k) p.lower[k] = 0.0;  // T >= 0

  for (const Edge& e : g.edges()) {
    LpRow r;
    r.coeffs.assign(p.vars, 0.0);
    r.coeffs[tri_index(n, e.u, e.u)] += 1.0;
    r.coeffs[tri_index(n, e.v, e.v)] += 1.0;
    r.coeffs[tri_index(n, e.u, e.v)] -= 2.0;
    r.sense = Sense::le;
    r.rhs = e.w * e.w;
    p.rows.push_back(std::move(r));
  }
  // Diagonal dominance: sum_{j != i} T_ij <= X_ii.
  for (std::size_t i = 0; i < n; ++i) {
    LpRow r;
    r.coeffs.assign(p.vars, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const std::size_t a = std::min(i, j), b = std::max(i, j);
      r.coeffs[nx + strict_index(n, a, b)] += 1.0;
    }
    r.coeffs[tri_index(n, i, i)] -= 1.0;
    r.sense = Sense::le;
    r.rhs = 0.0;
    p.rows.push_back(std::move(r));
  }
  // |X_ij| <= T_ij.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (const double sign : {1.0, -1.0}) {
        LpRow r;
        r.coeffs.assign(p.vars, 0.0);
        r.coeffs[tri_index(n, i, j)] = sign;
        r.coeffs[nx + strict_index(n, i, j)] = -1.0;
        r.sense = Sense::le;
        r.rhs = 0.0;
        p.rows.push_back(std::move(r));
      }
    }
  }
  return p;
}

LpProblem ddp_dual(const WeightedGraph& g) {
  const std::size_t n = g.vertex_count();
  const std::size_t nx = n * (n + 1) / 2;
  LpProblem p;
  p.vars = nx;
  p.maximize = true;
  p.objective = edge_objective_coeffs(g, p.vars);
  p.lower.assign(p.vars, -kInf);
  p.upper.assign(p.vars, kInf);

  for (const Edge& e : g.edges()) {
    LpRow r;
    r.coeffs.assign(p.vars, 0.0);
    r.coeffs[tri_index(n, e.u, e.u)] += 1.0;
    r.coeffs[tri_index(n, e.v, e.v)] += 1.0;
    r.coeffs[tri_index(n, e.u, e.v)] -= 2.0;
    r.sense = Sense::eq;
    r.rhs = e.w * e.w;
    p.rows.push_back(std::move(r));
  }
  // Nonnegativity of v^T X v on the dual cone generators {e_i}, {e_i +/- e_j}.
  for (std::size_t i = 0; i < n; ++i) {
    LpRow r;
    r.coeffs.assign(p.vars, 0.0);
    r.coeffs[tri_index(n, i, i)] = 1.0;
    r.sense = Sense::ge;
    r.rhs = 0.0;
    p.rows.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (const double sign : {1.0, -1.0}) {
        LpRow r;
        r.coeffs.assign(p.vars, 0.0);
        r.coeffs[tri_index(n, i, i)] = 1.0;
        r.coeffs[tri_index(n, j, j)] += 1.0;
        r.coeffs[tri_index(n, i, j)] = 2.0 * sign;
        r.sense = Sense::ge;
        r.rhs = 0.0;
        p.rows.push_back(std::move(r));
      }
    }
  }
  return p;
}

DdpResult ddp_primal_solve(const WeightedGraph& g) { return solve_ddp(g, ddp_primal(g)); }

DdpResult ddp_dual_solve(const WeightedGraph& g) { return solve_ddp(g, ddp_dual(g)); }

std::string sdp_result_to_json(const SdpResult& r) {
  nlohmann::json j;
  j["objective"] = r.objective;
  j["primal_residual"] = r.primal_residual;
  j["consensus_residual"] = r.consensus_residual;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  return j.dump(2) + "\n";
}

namespace {
const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
  }
  return "unknown";
}
}  // namespace

std::string lp_result_to_json(const LpResult& r) {
  nlohmann::json j;
  j["status"] = lp_status_name(r.status);
  j["objective"] = r.objective;
  j["x"] = r.x;
  return j.dump(2) + "\n";
}

std::string ddp_result_to_json(const DdpResult& r) {
  nlohmann::json j;
  j["status"] = lp_status_name(r.lp.status);
  j["objective"] = r.lp.objective;
  j["edge_objective"] = r.edge_objective;
  j["eigenvalues"] = r.eigenvalues;
  j["negative_eigenvalues"] = r.negative_eigenvalues;
  return j.dump(2) + "\n";
}

}  // namespace dg
