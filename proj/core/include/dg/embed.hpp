#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dg/graphs.hpp"
#include "dg/matrix.hpp"

namespace dg {

// Which norm a realization's rows are meant to be measured in.
enum class NormTag { l2, linf };

struct Embedding {
  Matrix points;  // one row per vertex/record
  NormTag norm = NormTag::l2;
};

// Spectrum of the centered Gram matrix as used by multidimensional scaling:
// all eigenvalues in descending order, plus the subset that produced no
// coordinate column (negatives zeroed by the positive-part rule and
// numerically-zero noise).
struct SpectrumReport {
  std::vector<double> eigenvalues;
  std::vector<double> clipped;
};

std::string spectrum_to_json(const SpectrumReport& report);

struct MdsResult {
  Matrix points;
  SpectrumReport spectrum;
};

// Universal isometric embedding into (R^n, max-norm): complete the metric by
// shortest paths, then use row i = column i of the completed matrix. Max-norm
// distances of rows reproduce the completed metric exactly.
Embedding frechet_embed(const WeightedGraph& g);

// Classic multidimensional scaling: shortest-path completion, double
// centering, eigendecomposition, negative eigenvalues clipped, coordinates
// P·sqrt(Lambda) truncated to k columns when k is given.
MdsResult classic_mds(const PartialDistanceMatrix& pdm,
                      std::optional<std::size_t> k = std::nullopt);

// Principal component analysis on raw coordinates: eigendecompose X X^T and
// keep the k largest nonnegative eigenvalues, columns ordered by descending
// eigenvalue. Requires k <= min(rows, cols).
Matrix pca_reduce(const Matrix& x, std::size_t k);

// Smallest k whose leading eigenvalues explain at least variance_fraction of
// the total positive spectrum of X X^T.
std::size_t pca_residual_dimension(const Matrix& x, double variance_fraction);

// Nonlinear reduction: build the sparsest connected proximity graph over the
// rows of X (edge iff distance <= tau, tau found by binary search over the
// sorted pairwise distances), complete by shortest paths, then scale to k
// dimensions.
Matrix isomap(const Matrix& x, std::size_t k);

}  // namespace dg
