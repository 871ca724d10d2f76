#pragma once

#include "ncpd/data.hpp"

namespace ncpd {

/// Spectral embedding: unit eigenvectors of the graph Laplacian for the K
/// algebraically smallest eigenvalues, eigenvalues ascending.
struct Embedding {
  Matrix vectors;      ///< p x K, orthonormal columns, deterministic signs
  Vector eigenvalues;  ///< length K, ascending
};

/// Graph Laplacian L = D - A with D = diag(row sums of A). The adjacency is
/// used as-is (signed correlations incur signed degrees). Throws errc::contract
/// if A is not symmetric within tolerance.
[[nodiscard]] Matrix laplacian(const Matrix& A);

/// Eigenvectors of L for the K smallest eigenvalues (2 <= K <= p). Sign
/// convention: each column is flipped so its largest-magnitude entry (lowest
/// index on ties) is positive.
[[nodiscard]] Embedding embed(const Matrix& L, int K);

}  // namespace ncpd
