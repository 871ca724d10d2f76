#include "ncpd/cluster.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ncpd/rng.hpp"

namespace ncpd {

namespace {

// Count exactly-distinct rows (lexicographic sort, then adjacent comparison).
int count_distinct_rows(const Matrix& X) {
  const auto n = X.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto lex_less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (X(a, j) < X(b, j)) return true;
      if (X(a, j) > X(b, j)) return false;
    }
    return false;
  };
  std::sort(order.begin(), order.end(), lex_less);
  int distinct = 1;
  for (std::size_t i = 1; i < order.size(); ++i)
    if (lex_less(order[i - 1], order[i])) ++distinct;
  return distinct;
}

// k-means++ seeding: first center uniform, then squared-distance weighted.
Matrix seed_centroids(const Matrix& X, int K, std::mt19937_64& rng) {
  const auto n = X.rows();
  Matrix centers(K, X.cols());
  std::uniform_int_distribution<Eigen::Index> uniform(0, n - 1);
  centers.row(0) = X.row(uniform(rng));

  Vector dist2 = (X.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int k = 1; k < K; ++k) {
    const double total = dist2.sum();
    Eigen::Index chosen;
    if (total <= 0.0) {
      chosen = uniform(rng);  // every point already coincides with a center
    } else {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      const double target = unit(rng) * total;
      double acc = 0.0;
      chosen = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2(i);
        if (acc >= target) {
          chosen = i;
          break;
        }
      }
    }
    centers.row(k) = X.row(chosen);
    dist2 = dist2.cwiseMin((X.rowwise() - centers.row(k)).rowwise().squaredNorm());
  }
  return centers;
}

// Nearest centroid, ties to the lowest index.
int assign_one(const Eigen::RowVectorXd& x, const Matrix& centers) {
  int best = 0;
  double best_d = (x - centers.row(0)).squaredNorm();
  for (int k = 1; k < centers.rows(); ++k) {
    const double d = (x - centers.row(k)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

#ifndef NDEBUG
double objective_of(const Matrix& X, const std::vector<int>& labels0, const Matrix& centers) {
  double obj = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    obj += (X.row(i) - centers.row(labels0[static_cast<std::size_t>(i)])).squaredNorm();
  return obj;
}
#endif

struct LloydResult {
  std::vector<int> labels0;  // 0-based during iteration
  Matrix centers;
  double objective = 0.0;
  bool converged = false;
  bool valid = true;  // every cluster non-empty in the final state
};

LloydResult lloyd(const Matrix& X, int K, const KMeansConfig& cfg, std::mt19937_64& rng) {
  const auto n = X.rows();
  LloydResult r;
  r.centers = seed_centroids(X, K, rng);
  r.labels0.assign(static_cast<std::size_t>(n), 0);

#ifndef NDEBUG
  double prev_objective = std::numeric_limits<double>::infinity();
#endif

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    // Assignment step.
    for (Eigen::Index i = 0; i < n; ++i)
      r.labels0[static_cast<std::size_t>(i)] = assign_one(X.row(i), r.centers);
#ifndef NDEBUG
    // Lloyd monotonicity: assigning to the nearest center cannot worsen the objective.
    const double after_assign = objective_of(X, r.labels0, r.centers);
    assert(after_assign <= prev_objective + 1e-9);
#endif

    // Update step: means of each cluster.
    Matrix fresh = Matrix::Zero(K, X.cols());
    std::vector<int> counts(static_cast<std::size_t>(K), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = r.labels0[static_cast<std::size_t>(i)];
      fresh.row(k) += X.row(i);
      ++counts[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < K; ++k)
      if (counts[static_cast<std::size_t>(k)] > 0) fresh.row(k) /= counts[static_cast<std::size_t>(k)];

    // Empty-cluster repair: reseed at the point farthest from its own centroid;
    // each repair steals a distinct point from a cluster that can spare one.
    bool repaired = false;
    std::vector<char> stolen(static_cast<std::size_t>(n), 0);
    for (int k = 0; k < K; ++k) {
      if (counts[static_cast<std::size_t>(k)] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (stolen[static_cast<std::size_t>(i)]) continue;
        const int owner = r.labels0[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] <= 1) continue;
        const double d = (X.row(i) - r.centers.row(owner)).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) fail(errc::degenerate, "empty-cluster repair found no point to move");
      repaired = true;
      stolen[static_cast<std::size_t>(far)] = 1;
      const int owner = r.labels0[static_cast<std::size_t>(far)];
      const int oc = counts[static_cast<std::size_t>(owner)];
      fresh.row(owner) = (fresh.row(owner) * oc - X.row(far)) / (oc - 1);
      counts[static_cast<std::size_t>(owner)] = oc - 1;
      fresh.row(k) = X.row(far);
      counts[static_cast<std::size_t>(k)] = 1;
      r.labels0[static_cast<std::size_t>(far)] = k;
    }

#ifndef NDEBUG
    if (!repaired) {
      // Replacing centers by cluster means cannot worsen the objective either.
      const double after_update = objective_of(X, r.labels0, fresh);
      assert(after_update <= after_assign + 1e-9);
      prev_objective = after_update;
    } else {
      prev_objective = std::numeric_limits<double>::infinity();
    }
#endif

    const double movement = (fresh - r.centers).rowwise().norm().maxCoeff();
    r.centers = std::move(fresh);
    if (!repaired && movement < cfg.tol) {
      r.converged = true;
      break;
    }
  }

  // Final assignment against the last centers, then exact centroid means so the
  // centroid-equals-cluster-mean invariant holds in the returned state.
  Matrix exact = Matrix::Zero(K, X.cols());
  std::vector<int> counts(static_cast<std::size_t>(K), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int k = assign_one(X.row(i), r.centers);
    r.labels0[static_cast<std::size_t>(i)] = k;
    exact.row(k) += X.row(i);
    ++counts[static_cast<std::size_t>(k)];
  }
  for (int k = 0; k < K; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      r.valid = false;  // caller skips this restart
      return r;
    }
    exact.row(k) /= counts[static_cast<std::size_t>(k)];
  }
  r.centers = std::move(exact);
  r.objective = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    r.objective += (X.row(i) - r.centers.row(r.labels0[static_cast<std::size_t>(i)])).squaredNorm();
  return r;
}

}  // namespace

ClusterAssignment kmeans(const Matrix& points, int K, const KMeansConfig& cfg,
                         std::uint64_t seed) {
  const auto n = points.rows();
  if (K < 1 || K > n)
    fail(errc::bounds, "K=" + std::to_string(K) + " outside [1, n=" + std::to_string(n) + "]");
  if (cfg.restarts < 1 || cfg.max_iters < 1 || cfg.tol < 0)
    fail(errc::config, "invalid k-means configuration");
  if (count_distinct_rows(points) < K)
    fail(errc::degenerate, "k-means needs at least K=" + std::to_string(K) + " distinct rows");

  LloydResult best;
  bool have_best = false;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    auto rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(restart)}));
    LloydResult r = lloyd(points, K, cfg, rng);
    if (!r.valid) continue;
    if (!have_best || r.objective < best.objective) {  // strict: ties keep the lower restart
      best = std::move(r);
      have_best = true;
    }
  }
  if (!have_best) fail(errc::degenerate, "k-means produced no valid partition in any restart");

  ClusterAssignment out;
  out.labels.resize(best.labels0.size());
  for (std::size_t i = 0; i < best.labels0.size(); ++i) out.labels[i] = best.labels0[i] + 1;
  out.centroids = std::move(best.centers);
  out.objective = best.objective;
  out.converged = best.converged;
  return out;
}

ClusterAssignment spectral_clustering(const Matrix& A, int K, const KMeansConfig& cfg,
                                      std::uint64_t seed, bool absolute_weights) {
  const Matrix L = laplacian(absolute_weights ? Matrix(A.cwiseAbs()) : A);
  const Embedding V = embed(L, K);
  return kmeans(V.vectors, K, cfg, seed);
}

}  // namespace ncpd
