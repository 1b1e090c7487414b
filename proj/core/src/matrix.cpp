#include "dg/matrix.hpp"

#include <cmath>

#include "dg/error.hpp"

namespace dg {

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == c, errc::dimension_mismatch, "matrix.from_rows", "ragged rows");
    std::size_t j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), errc::dimension_mismatch, "matrix.matmul",
          "inner dimensions differ");
  Matrix c(a.rows(), b.cols());
  // i-k-j order keeps the inner loop contiguous in b and c.
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const double* bk = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), errc::dimension_mismatch, "matrix.add", "shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) += b(i, j);
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), errc::dimension_mismatch, "matrix.sub", "shape mismatch");
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) -= b(i, j);
  return c;
}

Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) c(i, j) *= s;
  return c;
}

double frob_dot(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), errc::dimension_mismatch, "matrix.frob_dot", "shape mismatch");
  double s = 0.0;
  const double* pa = a.data();
  const double* pb = b.data();
  const std::size_t n = a.rows() * a.cols();
  for (std::size_t i = 0; i < n; ++i) s += pa[i] * pb[i];
  return s;
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::fabs(v));
  return m;
}

double trace(const Matrix& a) {
  require(a.rows() == a.cols(), errc::not_square, "matrix.trace", "matrix not square");
  double t = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

double asymmetry(const Matrix& a) {
  if (a.rows() != a.cols()) return 0.0;
  double m = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i + 1; j < a.cols(); ++j)
      m = std::max(m, std::fabs(a(i, j) - a(j, i)));
  return m;
}

Matrix symmetrized(const Matrix& a) {
  require(a.rows() == a.cols(), errc::not_square, "matrix.symmetrized", "matrix not square");
  Matrix s(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
  return s;
}

double row_sqdist(const Matrix& x, std::size_t i, std::size_t j) {
  const double* ri = x.row(i);
  const double* rj = x.row(j);
  double s = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) {
    const double d = ri[k] - rj[k];
    s += d * d;
  }
  return s;
}

double row_norm(const Matrix& x, std::size_t i) {
  const double* r = x.row(i);
  double s = 0.0;
  for (std::size_t k = 0; k < x.cols(); ++k) s += r[k] * r[k];
  return std::sqrt(s);
}

bool all_finite(const Matrix& a) {
  for (double v : a.values())
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace dg
