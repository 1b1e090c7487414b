#include "dg/embed.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "dg/error.hpp"
#include "dg/linalg.hpp"

namespace dg {
namespace {

// Squares a plain distance matrix entrywise.
Matrix squared(const Matrix& d) {
  Matrix out(d.rows(), d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (std::size_t j = 0; j < d.cols(); ++j) out(i, j) = d(i, j) * d(i, j);
  return out;
}

// Shared by classic_mds and the final stage of isomap: distances -> centered
// Gram -> spectral coordinates.
MdsResult scale_distances(const Matrix& dist, std::optional<std::size_t> k) {
  const Matrix gram = gram_from_edm(squared(dist));
  const SpectralDecomposition dec = jacobi_eig(gram);
  const std::size_t n = gram.rows();

  MdsResult res;
  res.spectrum.eigenvalues.reserve(n);
  // "Clipped" lists every eigenvalue that produced no coordinate column:
  // negatives zeroed by the positive-part rule plus numerically-zero noise.
  // The cutoff matches the one realization_from_gram applies.
  const double lmax = std::max(0.0, dec.eigenvalues.empty() ? 0.0 : dec.eigenvalues.back());
  const double cut = 1e-9 * std::max(1.0, lmax);
  for (std::size_t i = 0; i < n; ++i) {
    const double lam = dec.eigenvalues[n - 1 - i];
    res.spectrum.eigenvalues.push_back(lam);
    if (lam <= cut) res.spectrum.clipped.push_back(lam);
  }
  res.points = realization_from_gram(gram, k);
  return res;
}

}  // namespace

std::string spectrum_to_json(const SpectrumReport& report) {
  nlohmann::json j;
  j["eigenvalues"] = report.eigenvalues;
  j["clipped"] = report.clipped;
  return j.dump(2) + "\n";
}

Embedding frechet_embed(const WeightedGraph& g) {
  const Matrix d = floyd_warshall_complete(g);
  Embedding e;
  e.points = d;  // symmetric, so row i equals column i of the completed metric
  e.norm = NormTag::linf;
  return e;
}

MdsResult classic_mds(const PartialDistanceMatrix& pdm, std::optional<std::size_t> k) {
  return scale_distances(floyd_warshall_complete(pdm), k);
}

Matrix pca_reduce(const Matrix& x, std::size_t k) {
  const char* op = "embed.pca_reduce";
  require(k >= 1, errc::bad_value, op, "target dimension must be at least 1");
  require(k <= std::min(x.rows(), x.cols()), errc::dimension_mismatch, op,
          "target dimension exceeds min(rows, cols)");
  const Matrix gram = matmul(x, transpose(x));
  return realization_from_gram(gram, k);
}

std::size_t pca_residual_dimension(const Matrix& x, double variance_fraction) {
  const char* op = "embed.pca_residual_dimension";
  require(variance_fraction >= 0.0 && variance_fraction <= 1.0, errc::bad_value, op,
          "variance fraction must lie in [0,1]");
  const Matrix gram = matmul(x, transpose(x));
  std::vector<double> ev = jacobi_eigenvalues(gram);
  std::reverse(ev.begin(), ev.end());  // descending
  double total = 0.0;
  for (double lam : ev) total += std::max(0.0, lam);
  if (total <= 0.0) return 1;  // all-zero data: one dimension carries everything
  double acc = 0.0;
  for (std::size_t k = 0; k < ev.size(); ++k) {
    acc += std::max(0.0, ev[k]);
    if (acc / total >= variance_fraction) return k + 1;
  }
  return ev.size();
}

Matrix isomap(const Matrix& x, std::size_t k) {
  const char* op = "embed.isomap";
  const std::size_t n = x.rows();
  require(n >= 2, errc::empty_input, op, "need at least two points");
  require(k >= 1, errc::bad_value, op, "target dimension must be at least 1");

  Matrix dist(n, n);
  std::vector<double> levels;
  levels.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(row_sqdist(x, i, j));
      dist(i, j) = dist(j, i) = d;
      levels.push_back(d);
    }
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  const auto connected_at = [&](double tau) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (!seen[v] && v != u && dist(u, v) <= tau) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == n;
  };

  // Binary search for the smallest pairwise distance whose proximity graph
  // is connected; the largest level always connects.
  std::size_t lo = 0;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (connected_at(levels[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const double tau = levels[lo];

  PartialDistanceMatrix pdm(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (dist(i, j) <= tau) pdm.set(i, j, dist(i, j));

  return scale_distances(floyd_warshall_complete(pdm), k).points;
}

}  // namespace dg
