#pragma once

#include "ncpd/cluster.hpp"
#include "ncpd/data.hpp"

namespace ncpd {

/// Singular-value similarity between two K-column network representations.
struct CriterionValue {
  double gamma = 0.0;      ///< sum of singular values (nuclear norm of U_L^T U_R)
  Vector singular_values;  ///< length K, nonincreasing, values under 1e-14 clamped to 0
};

/// Expand an assignment to the p x K matrix whose row i is the centroid of
/// node i's community.
[[nodiscard]] Matrix centroid_expand(const ClusterAssignment& assignment);

/// gamma(U_L, U_R): singular values of the K x K product U_L^T U_R and their
/// sum. Large gamma = similar community structure; the change-point sweep looks
/// for the minimum. Requires matching shapes.
[[nodiscard]] CriterionValue gamma_similarity(const Matrix& UL, const Matrix& UR);

/// Identical computation, exposed under the cross-network comparison name used
/// when pairing networks across subjects or partitions rather than across a split.
[[nodiscard]] inline CriterionValue network_similarity(const Matrix& Ua, const Matrix& Ub) {
  return gamma_similarity(Ua, Ub);
}

}  // namespace ncpd
