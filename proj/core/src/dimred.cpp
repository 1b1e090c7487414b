#include "dg/dimred.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "dg/error.hpp"
#include "dg/linalg.hpp"
#include "dg/rng.hpp"

namespace dg {

std::size_t jll_dimension(std::size_t points, const JllConfig& cfg) {
  require(cfg.epsilon > 0.0 && cfg.epsilon < 1.0, errc::bad_value, "dimred.jll_dimension",
          "epsilon must lie in (0,1)");
  require(cfg.c > 0.0, errc::bad_value, "dimred.jll_dimension", "constant must be positive");
  if (points < 2) return 1;
  const double k = std::ceil(cfg.c * std::log(static_cast<double>(points)) /
                             (cfg.epsilon * cfg.epsilon));
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

RandomProjection make_rp(std::size_t n, std::size_t k, double density, std::uint64_t seed) {
  const char* op = "dimred.make_rp";
  require(n >= 1 && k >= 1, errc::empty_input, op, "dimensions must be at least 1");
  require(density > 0.0 && density <= 1.0, errc::bad_density, op,
          "density must lie in (0,1]");
  RandomProjection rp;
  rp.k = k;
  rp.n = n;
  rp.density = density;
  rp.seed = seed;
  rp.entries = Matrix(k, n);
  Rng rng(seed);
  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  const double sparse_scale = scale / std::sqrt(density);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (density >= 1.0) {
        rp.entries(i, j) = scale * rng.normal();
      } else if (rng.uniform01() < density) {
        rp.entries(i, j) = sparse_scale * rng.normal();
      }
    }
  }
  return rp;
}

Matrix apply_rp(const RandomProjection& rp, const Matrix& x) {
  require(x.cols() == rp.n, errc::dimension_mismatch, "dimred.apply_rp",
          "row width must match the projection's source dimension");
  // out = x * T^t, one k-vector per row.
  Matrix out(x.rows(), rp.k);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t i = 0; i < rp.k; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < rp.n; ++j) dot += x(r, j) * rp.entries(i, j);
      out(r, i) = dot;
    }
  return out;
}

JllReport jll_distortion(const Matrix& x, const Matrix& tx, double epsilon,
                         std::size_t max_pairs, std::uint64_t seed) {
  const char* op = "dimred.jll_distortion";
  require(x.rows() == tx.rows(), errc::dimension_mismatch, op,
          "original and projected matrices must have matching row counts");
  require(epsilon > 0.0 && epsilon < 1.0, errc::bad_value, op, "epsilon must lie in (0,1)");
  const std::size_t rows = x.rows();
  JllReport rep;
  if (rows < 2) return rep;

  double lo = 0.0, hi = 0.0;
  const auto check_pair = [&](std::size_t i, std::size_t j) {
    const double orig = row_sqdist(x, i, j);
    if (orig == 0.0) return;
    const double stretch = std::sqrt(row_sqdist(tx, i, j) / orig);
    if (rep.checked_pairs == 0) {
      lo = hi = stretch;
    } else {
      lo = std::min(lo, stretch);
      hi = std::max(hi, stretch);
    }
    ++rep.checked_pairs;
    if (stretch < 1.0 - epsilon || stretch > 1.0 + epsilon) ++rep.violating_pairs;
  };

  const std::size_t total = rows * (rows - 1) / 2;
  if (max_pairs == 0 || max_pairs >= total) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = i + 1; j < rows; ++j) check_pair(i, j);
  } else {
    Rng rng(seed);
    for (std::size_t t = 0; t < max_pairs; ++t) {
      const std::size_t i = rng.below(rows);
      std::size_t j = rng.below(rows - 1);
      if (j >= i) ++j;
      check_pair(std::min(i, j), std::max(i, j));
    }
  }
  if (rep.checked_pairs > 0) {
    rep.min_stretch = lo;
    rep.max_stretch = hi;
    rep.violation_fraction =
        static_cast<double>(rep.violating_pairs) / static_cast<double>(rep.checked_pairs);
  }
  return rep;
}

std::string jll_report_to_json(const JllReport& r) {
  nlohmann::json j;
  j["max_stretch"] = r.max_stretch;
  j["min_stretch"] = r.min_stretch;
  j["checked_pairs"] = r.checked_pairs;
  j["violating_pairs"] = r.violating_pairs;
  j["violation_fraction"] = r.violation_fraction;
  return j.dump(2) + "\n";
}

double norm_preservation_stat(std::size_t n, std::size_t k, std::size_t samples,
                              std::uint64_t seed) {
  const char* op = "dimred.norm_preservation_stat";
  require(n >= 1 && k >= 1, errc::empty_input, op, "dimensions must be at least 1");
  require(samples >= 1, errc::empty_input, op, "need at least one sample");
  const Rng base(seed);

  // Fixed direction u, drawn once and normalized.
  std::vector<double> u(n);
  {
    Rng ur = base.split(0);
    double norm2 = 0.0;
    for (double& ui : u) {
      ui = ur.normal();
      norm2 += ui * ui;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& ui : u) ui *= inv;
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(k));
  double mean = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Rng tr = base.split(s + 1);  // fresh projection per repetition
    double total = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < n; ++j) dot += tr.normal() * u[j];
      dot *= scale;
      total += dot * dot;
    }
    mean += (total - mean) / static_cast<double>(s + 1);
  }
  return mean;
}

IdentityStats identity_stats(std::size_t n, double epsilon, std::uint64_t seed) {
  const char* op = "dimred.identity_stats";
  require(n >= 2, errc::empty_input, op, "need at least two source dimensions");
  require(epsilon > 0.0 && epsilon < 1.0, errc::bad_value, op, "epsilon must lie in (0,1)");
  IdentityStats st;
  st.n = n;
  st.d = static_cast<std::size_t>(
      std::ceil(std::log(static_cast<double>(n)) / (epsilon * epsilon)));
  st.d = std::max<std::size_t>(1, st.d);
  const RandomProjection rp = make_rp(n, st.d, 1.0, seed);
  const Matrix& t = rp.entries;  // d x n

  // Gram of the rows (d x d), then spectral distances to the identity under
  // the three scalings.
  Matrix tt(st.d, st.d);
  for (std::size_t i = 0; i < st.d; ++i)
    for (std::size_t j = i; j < st.d; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < n; ++c) dot += t(i, c) * t(j, c);
      tt(i, j) = tt(j, i) = dot;
    }
  const auto spectral_dist = [&](double s) {
    Matrix m = s * tt;
    for (std::size_t i = 0; i < st.d; ++i) m(i, i) -= 1.0;
    return norms(m).spectral;
  };
  st.norm_TTt_over_n = spectral_dist(1.0 / static_cast<double>(n));
  st.norm_TTt_over_d = spectral_dist(1.0 / static_cast<double>(st.d));
  st.norm_TTt_raw = spectral_dist(1.0);

  // Diagonal and off-diagonal means of the n x n matrix T^t T, computed from
  // column norms and column sums without materializing it.
  double frob2 = 0.0;
  for (std::size_t i = 0; i < st.d; ++i) frob2 += tt(i, i);
  double grand = 0.0;  // 1^t (T^t T) 1 = |T 1|^2
  for (std::size_t i = 0; i < st.d; ++i) {
    double rowsum = 0.0;
    for (std::size_t c = 0; c < n; ++c) rowsum += t(i, c);
    grand += rowsum * rowsum;
  }
  st.diag_mean = frob2 / static_cast<double>(n);
  st.offdiag_mean =
      (grand - frob2) / (static_cast<double>(n) * static_cast<double>(n - 1));
  return st;
}

Matrix barvinok_naive(const Matrix& gram, std::size_t k, std::uint64_t seed) {
  const char* op = "dimred.barvinok_naive";
  require(gram.rows() == gram.cols(), errc::not_square, op, "Gram matrix must be square");
  require(k >= 1, errc::empty_input, op, "target dimension must be at least 1");
  const std::size_t n = gram.rows();
  const SpectralDecomposition dec = jacobi_eig(gram);
  require(dec.eigenvalues.front() >= -1e-7, errc::not_psd, op,
          "Gram matrix must be positive semidefinite within 1e-7");

  // Factor T = P sqrt(max(Lambda,0)), columns scaled in place.
  Matrix factor = dec.eigenvectors;  // n x n, column j pairs with eigenvalue j
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::sqrt(std::max(0.0, dec.eigenvalues[j]));
    for (std::size_t i = 0; i < n; ++i) factor(i, j) *= s;
  }
  Matrix y(n, k);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < k; ++j) y(i, j) = rng.normal();
  return matmul(factor, y);
}

}  // namespace dg
