#include "dg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dg/error.hpp"
#include "dg/rng.hpp"

namespace dg {
namespace {

constexpr int kMaxSweeps = 100;

void check_symmetric_input(const Matrix& a, const char* op) {
  require(a.rows() == a.cols(), errc::not_square, op, "matrix not square");
  require(a.rows() > 0, errc::empty_input, op, "matrix is empty");
  const double scale = std::max(1.0, max_abs(a));
  require(asymmetry(a) <= 1e-10 * scale, errc::not_symmetric, op,
          "matrix not symmetric within 1e-10 relative tolerance");
}

double offdiag_sq(const Matrix& a) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.rows(); ++p)
    for (std::size_t q = p + 1; q < a.cols(); ++q) s += a(p, q) * a(p, q);
  return s;
}

// Jacobi rotations on the symmetrized copy; eigenvector accumulation optional.
void jacobi_core(Matrix& a, Matrix* v, const char* op) {
  const std::size_t n = a.rows();
  const double scale = std::max(1.0, frobenius_norm(a));
  const double tol2 = (1e-13 * scale) * (1e-13 * scale);

  int sweep = 0;
  for (; sweep < kMaxSweeps; ++sweep) {
    const double off2 = offdiag_sq(a);
    if (off2 <= tol2) break;
    // Threshold sweep: early sweeps only rotate entries above a fraction of
    // the remaining off-diagonal mass, later sweeps rotate everything.
    const double thresh = sweep < 3 ? 0.2 * off2 / static_cast<double>(n * n) : 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        if (apq * apq <= thresh) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Skip rotations that cannot change anything at double precision.
        if (std::fabs(apq) < 1e-300) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double h = aqq - app;
        double t;
        if (std::fabs(apq) * 1e15 < std::fabs(h)) {
          t = apq / h;
        } else {
          const double theta = 0.5 * h / apq;
          t = 1.0 / (std::fabs(theta) + std::sqrt(1.0 + theta * theta));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = akp - s * (akq + tau * akp);
          a(p, k) = a(k, p);
          a(k, q) = akq + s * (akp - tau * akq);
          a(q, k) = a(k, q);
        }
        if (v != nullptr) {
          for (std::size_t k = 0; k < n; ++k) {
            const double vkp = (*v)(k, p);
            const double vkq = (*v)(k, q);
            (*v)(k, p) = vkp - s * (vkq + tau * vkp);
            (*v)(k, q) = vkq + s * (vkp - tau * vkq);
          }
        }
      }
    }
  }
  require(offdiag_sq(a) <= tol2 || sweep < kMaxSweeps, errc::no_convergence, op,
          "sweep cap exceeded");
}

}  // namespace

SpectralDecomposition jacobi_eig(const Matrix& input) {
  const char* op = "linalg.jacobi_eig";
  check_symmetric_input(input, op);
  Matrix a = symmetrized(input);
  const std::size_t n = a.rows();
  Matrix v = Matrix::identity(n);
  jacobi_core(a, &v, op);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  SpectralDecomposition d;
  d.eigenvalues.resize(n);
  d.eigenvectors = Matrix(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t src = order[c];
    d.eigenvalues[c] = a(src, src);
    // Deterministic sign: largest-magnitude component (first on ties) positive.
    std::size_t imax = 0;
    double vmax = -1.0;
    for (std::size_t r = 0; r < n; ++r) {
      const double m = std::fabs(v(r, src));
      if (m > vmax) {
        vmax = m;
        imax = r;
      }
    }
    const double sign = v(imax, src) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r) d.eigenvectors(r, c) = sign * v(r, src);
  }
  return d;
}

std::vector<double> jacobi_eigenvalues(const Matrix& input) {
  const char* op = "linalg.jacobi_eigenvalues";
  check_symmetric_input(input, op);
  Matrix a = symmetrized(input);
  jacobi_core(a, nullptr, op);
  std::vector<double> ev(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

Matrix psd_project(const Matrix& a) {
  const SpectralDecomposition d = jacobi_eig(a);
  const std::size_t n = a.rows();
  Matrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lam = d.eigenvalues[k];
    if (lam <= 0.0) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double pik = d.eigenvectors(i, k) * lam;
      for (std::size_t j = i; j < n; ++j) {
        out(i, j) += pik * d.eigenvectors(j, k);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(j, i) = out(i, j);
  return out;
}

Matrix edm_from_realization(const Matrix& x) {
  require(all_finite(x), errc::bad_value, "linalg.edm_from_realization",
          "realization has non-finite entries");
  const std::size_t n = x.rows();
  Matrix d2(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = row_sqdist(x, i, j);
      d2(i, j) = d2(j, i) = s;
    }
  }
  return d2;
}

Matrix gram_from_edm(const Matrix& d2) {
  const char* op = "linalg.gram_from_edm";
  check_symmetric_input(d2, op);
  const std::size_t n = d2.rows();
  const double scale = std::max(1.0, max_abs(d2));
  for (std::size_t i = 0; i < n; ++i) {
    require(std::fabs(d2(i, i)) <= 1e-12 * scale, errc::bad_diagonal, op,
            "squared distance matrix must have zero diagonal");
    for (std::size_t j = 0; j < n; ++j)
      require(d2(i, j) >= -1e-12 * scale, errc::bad_value, op,
              "squared distances must be nonnegative");
  }
  // G_ij = -1/2 (D2_ij - rowmean_i - rowmean_j + totalmean)
  std::vector<double> rowmean(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += d2(i, j);
    rowmean[i] = s / static_cast<double>(n);
    total += s;
  }
  const double totalmean = total / static_cast<double>(n * n);
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      g(i, j) = -0.5 * (d2(i, j) - rowmean[i] - rowmean[j] + totalmean);
  return symmetrized(g);
}

Matrix realization_from_gram(const Matrix& g, std::optional<std::size_t> k) {
  const SpectralDecomposition d = jacobi_eig(g);
  const std::size_t n = g.rows();
  // Spectrum descending; clip negatives and numerically-zero noise so padded
  // columns come out exactly zero.
  std::vector<std::pair<double, std::size_t>> lam;
  lam.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    lam.emplace_back(std::max(0.0, d.eigenvalues[n - 1 - i]), n - 1 - i);
  const double lmax = lam.empty() ? 0.0 : lam.front().first;
  const double cut = 1e-9 * std::max(1.0, lmax);
  for (auto& [value, idx] : lam)
    if (value <= cut) value = 0.0;

  std::size_t width;
  if (k.has_value()) {
    width = *k;
  } else {
    width = 0;
    for (const auto& [value, idx] : lam)
      if (value > 0.0) ++width;
    if (width == 0) width = 1;  // all-zero Gram still yields one (zero) column
  }
  Matrix y(n, width);
  for (std::size_t c = 0; c < width && c < n; ++c) {
    const double s = std::sqrt(lam[c].first);
    if (s == 0.0) continue;
    const std::size_t src = lam[c].second;
    for (std::size_t r = 0; r < n; ++r) y(r, c) = s * d.eigenvectors(r, src);
  }
  return y;
}

Norms norms(const Matrix& a) {
  Norms out;
  out.frobenius = frobenius_norm(a);
  out.max_abs = max_abs(a);
  if (out.frobenius == 0.0) return out;

  // Power iteration on B = A^T A (or A A^T, whichever is smaller), with a
  // fixed-seed random start so the estimate is deterministic and almost
  // surely not orthogonal to the dominant eigenvector.
  const bool wide = a.rows() < a.cols();
  const Matrix& m = a;
  const std::size_t dim = wide ? a.rows() : a.cols();
  Rng rng(0x5EED5EED5EEDULL);
  std::vector<double> v(dim);
  double nv = 0.0;
  for (auto& x : v) {
    x = rng.normal();
    nv += x * x;
  }
  nv = std::sqrt(nv);
  for (auto& x : v) x /= nv;

  std::vector<double> tmp(wide ? a.cols() : a.rows());
  std::vector<double> w(dim);
  double lambda = 0.0;
  for (int iter = 0; iter < 10000; ++iter) {
    // w = B v computed as two rectangular products.
    if (!wide) {
      // tmp = A v ; w = A^T tmp
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* ri = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += ri[j] * v[j];
        tmp[i] = s;
      }
      std::fill(w.begin(), w.end(), 0.0);
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* ri = m.row(i);
        const double ti = tmp[i];
        for (std::size_t j = 0; j < m.cols(); ++j) w[j] += ri[j] * ti;
      }
    } else {
      // tmp = A^T v ; w = A tmp
      std::fill(tmp.begin(), tmp.end(), 0.0);
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* ri = m.row(i);
        const double vi = v[i];
        for (std::size_t j = 0; j < m.cols(); ++j) tmp[j] += ri[j] * vi;
      }
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const double* ri = m.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += ri[j] * tmp[j];
        w[i] = s;
      }
    }
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    if (nw == 0.0) {
      lambda = 0.0;
      break;
    }
    const double next = nw;  // since ||v|| = 1, ||Bv|| estimates lambda_max
    for (std::size_t i = 0; i < dim; ++i) v[i] = w[i] / nw;
    if (iter > 0 && std::fabs(next - lambda) <= 1e-8 * std::max(1e-300, next)) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  out.spectral = std::sqrt(lambda);
  return out;
}

}  // namespace dg
