#include "ncpd/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace ncpd {

Matrix laplacian(const Matrix& A) {
  if (A.rows() != A.cols())
    fail(errc::dimension, "adjacency matrix must be square, got " + std::to_string(A.rows()) +
                              "x" + std::to_string(A.cols()));
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    fail(errc::contract, "adjacency matrix is not symmetric (max asymmetry " +
                             std::to_string(asym) + ")");
  Matrix L = -A;
  L.diagonal() += A.rowwise().sum();
  return L;
}

Embedding embed(const Matrix& L, int K) {
  const auto p = L.rows();
  if (K < 2 || K > p)
    fail(errc::bounds, "embedding dimension K=" + std::to_string(K) +
                           " outside [2, p=" + std::to_string(p) + "]");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(L);
  if (solver.info() != Eigen::Success)
    fail(errc::numerical, "eigendecomposition of the Laplacian failed");

  // Eigen returns eigenvalues ascending; keep the K smallest.
  Embedding out;
  out.vectors = solver.eigenvectors().leftCols(K);
  out.eigenvalues = solver.eigenvalues().head(K);

  // Deterministic sign: largest-magnitude entry (lowest index on ties) positive.
  for (int k = 0; k < K; ++k) {
    auto col = out.vectors.col(k);
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < p; ++i) {
      const double mag = std::abs(col(i));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (col(arg) < 0) col = -col;
  }
  return out;
}

}  // namespace ncpd
