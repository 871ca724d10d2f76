#pragma once

#include <cstdint>
#include <vector>

#include "ncpd/data.hpp"
#include "ncpd/spectral.hpp"

namespace ncpd {

struct KMeansConfig {
  int restarts = 10;
  int max_iters = 100;
  double tol = 1e-8;  ///< converged when max centroid movement drops below this
};

/// k-means result: 1-based community labels plus the centroid of each community.
struct ClusterAssignment {
  std::vector<int> labels;  ///< length p, entries in {1..K}
  Matrix centroids;         ///< K x d (d = K for spectral embeddings)
  double objective = 0.0;   ///< within-cluster sum of squared distances
  bool converged = true;
};

/// Lloyd's algorithm with k-means++ seeding, `restarts` independent restarts
/// (best objective wins, ties to the lowest restart index), empty-cluster
/// repair, and deterministic nearest-centroid tie-breaking (lowest index).
/// Throws errc::degenerate when the points have fewer than K distinct rows.
[[nodiscard]] ClusterAssignment kmeans(const Matrix& points, int K, const KMeansConfig& cfg,
                                       std::uint64_t seed);

/// Full spectral clustering of a (correlation) adjacency matrix:
/// laplacian -> embed -> kmeans on the embedding rows.
/// absolute_weights replaces A by |A| entrywise before the Laplacian.
[[nodiscard]] ClusterAssignment spectral_clustering(const Matrix& A, int K,
                                                    const KMeansConfig& cfg, std::uint64_t seed,
                                                    bool absolute_weights = false);

}  // namespace ncpd
