#include "ncpd/criterion.hpp"

#include <Eigen/SVD>
#include <string>

namespace ncpd {

Matrix centroid_expand(const ClusterAssignment& assignment) {
  const auto p = static_cast<Eigen::Index>(assignment.labels.size());
  const auto K = assignment.centroids.rows();
  Matrix U(p, assignment.centroids.cols());
  for (Eigen::Index i = 0; i < p; ++i) {
    const int label = assignment.labels[static_cast<std::size_t>(i)];
    if (label < 1 || label > K)
      fail(errc::contract, "label " + std::to_string(label) + " outside {1.." +
                               std::to_string(K) + "}");
    U.row(i) = assignment.centroids.row(label - 1);
  }
  return U;
}

CriterionValue gamma_similarity(const Matrix& UL, const Matrix& UR) {
  if (UL.rows() != UR.rows() || UL.cols() != UR.cols())
    fail(errc::dimension, "gamma needs matching shapes, got " + std::to_string(UL.rows()) + "x" +
                              std::to_string(UL.cols()) + " vs " + std::to_string(UR.rows()) +
                              "x" + std::to_string(UR.cols()));

  const Matrix product = UL.transpose() * UR;  // K x K
  Eigen::JacobiSVD<Matrix> svd(product);

  CriterionValue out;
  out.singular_values = svd.singularValues();
  for (Eigen::Index k = 0; k < out.singular_values.size(); ++k)
    if (out.singular_values(k) < 1e-14) out.singular_values(k) = 0.0;  // suppress rank noise
  out.gamma = out.singular_values.sum();
  return out;
}

}  // namespace ncpd
