#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "dg/matrix.hpp"

namespace dg {

// Eigenpairs of a real symmetric matrix: A = P diag(eigenvalues) P^T with
// orthonormal columns in P and eigenvalues sorted ascending. Each eigenvector
// is sign-normalized so its largest-magnitude component (lowest index on a
// tie) is positive, which keeps decompositions deterministic.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  Matrix eigenvectors;  // columns are the eigenvectors, same order as eigenvalues
};

// Cyclic Jacobi eigensolver with threshold sweeps (cap 100 sweeps).
// Input must be square and symmetric within 1e-10 relative tolerance; it is
// symmetrized as (A + A^T)/2 before rotation.
SpectralDecomposition jacobi_eig(const Matrix& a);

// As jacobi_eig but without accumulating eigenvectors (ascending order).
std::vector<double> jacobi_eigenvalues(const Matrix& a);

// Nearest positive-semidefinite matrix: P max(Lambda, 0) P^T.
Matrix psd_project(const Matrix& a);

// D2_ij = squared Euclidean distance of rows i and j of x.
Matrix edm_from_realization(const Matrix& x);

// Double centering G = -1/2 * J * D2 * J with J = I - (1/n) 1 1^T.
// D2 must be square, symmetric, nonnegative, with zero diagonal.
Matrix gram_from_edm(const Matrix& d2);

// Factor a symmetric G as Y Y^T via its spectral decomposition, clipping
// negative eigenvalues to zero. Columns are ordered by descending eigenvalue.
// If k is given, exactly k columns are returned (zero-padded when k exceeds
// the positive spectrum); otherwise the numerical rank decides the width.
Matrix realization_from_gram(const Matrix& g, std::optional<std::size_t> k = std::nullopt);

struct Norms {
  double frobenius = 0.0;
  double spectral = 0.0;  // largest singular value, power iteration on A^T A
  double max_abs = 0.0;
};

Norms norms(const Matrix& a);

}  // namespace dg
