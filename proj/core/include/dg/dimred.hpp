#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dg/matrix.hpp"

namespace dg {

// Random linear map for dimensionality reduction. Entries are i.i.d.
// N(0, 1/k); with density p < 1 only a p-fraction of entries is kept and the
// survivors are rescaled by 1/sqrt(p) so the expected Gram stays the
// identity. Fully determined by (n, k, density, seed).
struct RandomProjection {
  std::size_t k = 0;  // target dimension (rows)
  std::size_t n = 0;  // source dimension (columns)
  double density = 1.0;
  std::uint64_t seed = 0;
  Matrix entries;  // k x n
};

// Target-dimension rule k = ceil(C * ln(points) / epsilon^2) with the
// empirical default C = 1.8.
struct JllConfig {
  double epsilon = 0.2;
  double c = 1.8;
};

std::size_t jll_dimension(std::size_t points, const JllConfig& cfg);

RandomProjection make_rp(std::size_t n, std::size_t k, double density, std::uint64_t seed);

// Applies the projection to each row of x (rows are n-vectors); the result
// has k columns.
Matrix apply_rp(const RandomProjection& rp, const Matrix& x);

// Pairwise distance distortion audit between original rows and projected
// rows. Stretch of a pair is |Tx_i - Tx_j| / |x_i - x_j|; pairs with zero
// original distance are skipped. A pair violates when its stretch falls
// outside [1-epsilon, 1+epsilon].
struct JllReport {
  double max_stretch = 1.0;
  double min_stretch = 1.0;
  std::size_t checked_pairs = 0;
  std::size_t violating_pairs = 0;
  double violation_fraction = 0.0;
};

// max_pairs = 0 audits every distinct pair; otherwise that many pairs are
// sampled with the given seed.
JllReport jll_distortion(const Matrix& x, const Matrix& tx, double epsilon,
                         std::size_t max_pairs = 0, std::uint64_t seed = 0);

std::string jll_report_to_json(const JllReport& r);

// Monte Carlo mean of |Tu|^2 / |u|^2 for a fixed unit vector u and a fresh
// dense projection per sample (substream per repetition).
double norm_preservation_stat(std::size_t n, std::size_t k, std::size_t samples,
                              std::uint64_t seed);

// How close a dense k=d projection comes to behaving like the identity:
// spectral norms of s*TT^t - I for s in {1/n, 1/d, 1} plus the mean diagonal
// and off-diagonal entries of T^t T, with d = ceil(ln(n)/epsilon^2).
struct IdentityStats {
  std::size_t n = 0;
  std::size_t d = 0;
  double norm_TTt_over_n = 0.0;
  double norm_TTt_over_d = 0.0;
  double norm_TTt_raw = 0.0;
  double diag_mean = 0.0;
  double offdiag_mean = 0.0;
};

IdentityStats identity_stats(std::size_t n, double epsilon, std::uint64_t seed);

// Randomized rounding of a PSD Gram matrix into K dimensions: factor
// T = P sqrt(max(Lambda, 0)), draw y with i.i.d. standard normal entries
// (n x K), return T y. The result seeds a local descent refinement.
Matrix barvinok_naive(const Matrix& gram, std::size_t k, std::uint64_t seed);

}  // namespace dg
