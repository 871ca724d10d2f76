#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncpd/cluster.hpp"
#include "ncpd/data.hpp"
#include "ncpd/inference.hpp"

namespace ncpd {

/// Which representation of each side feeds the gamma criterion.
///
/// embedding — gamma on the spectral embeddings themselves (sum of principal-
/// angle cosines between the two K-dimensional eigen-subspaces). Moves
/// continuously with the data, so the trace develops a sharp minimum at a
/// structural change; the default.
///
/// centroid — gamma on centroid expansions of the two clusterings. Depends on
/// the data only through the label confusion matrix, which leaves the trace
/// locally flat around a change; kept for comparison studies.
enum class CriterionBasis { embedding, centroid };

struct DetectConfig {
  int K = 3;
  int n_min = 50;      ///< minimum side length and minimum spacing of change points
  double alpha = 0.05;
  int resamples = 1000;
  int mean_block_length = 0;  ///< 0 = fraction rule below
  double block_frac = 0.2;    ///< mean block length as a fraction of segment length
  ResampleMode mode = ResampleMode::stationary;
  CriterionBasis basis = CriterionBasis::embedding;
  bool absolute_weights = false;
  KMeansConfig kmeans;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Gamma trace over a segment's candidate window with outlier bookkeeping.
struct CandidateSeries {
  std::vector<int> positions;      ///< global 1-based candidates, strictly increasing
  std::vector<double> gammas;
  std::vector<double> eta;         ///< local roughness scores of the gamma trace
  std::vector<char> outlier_mask;  ///< 1 = excluded by the largest-5%-eta rule
  bool mask_warning = false;       ///< single candidate: no masking possible
  [[nodiscard]] int size() const noexcept { return static_cast<int>(positions.size()); }
};

/// One bootstrap decision taken during the recursion.
struct SegmentTest {
  SegmentView segment;
  int candidate = 0;  ///< global position tested (the segment's masked argmin)
  double gamma_observed = 0.0;
  double c_alpha = 0.0;
  bool significant = false;
  int resamples = 0;
  double null_min = 0.0, null_median = 0.0, null_max = 0.0;
  int num_candidates = 0, num_masked = 0;
  bool near_edge = false;  ///< within 10 of n_min or T - n_min (edge phenomenon); flagged only
  bool mask_warning = false;
};

struct SegmentFailure {
  SegmentView segment;
  std::string message;
};

/// Full search-and-split result.
struct ChangePointReport {
  int T = 0, p = 0;
  std::vector<int> change_points;       ///< significant points, sorted, global 1-based
  std::vector<SegmentTest> tests;       ///< recursion order
  std::vector<CandidateSeries> traces;  ///< parallel to tests
  std::vector<SegmentFailure> failures; ///< branches abandoned due to degeneracy
};

/// Gamma between the two sides of the segment split after global position
/// delta, under cfg's basis.
[[nodiscard]] double gamma_at(const Matrix& Y, const SegmentView& seg, int delta_global,
                              const DetectConfig& cfg);

/// Evaluate gamma at every candidate delta in
/// [seg.start + n_min - 1, seg.end - n_min], fill eta scores and the outlier
/// mask. Requires segment length >= 2*n_min.
[[nodiscard]] CandidateSeries sweep(const Matrix& Y, const SegmentView& seg,
                                    const DetectConfig& cfg);

/// Mask exactly ceil(0.05*m) candidates: those with the largest eta, ties by
/// larger eta then lower index. m = 1 leaves nothing masked and sets the warning.
void detect_outliers(CandidateSeries& series);

/// Unmasked position with minimal gamma, ties to the lowest time index.
[[nodiscard]] int best_candidate(const CandidateSeries& series);

/// Binary segmentation over the whole series: per segment, sweep -> mask ->
/// argmin -> bootstrap test; significant points are recorded and both child
/// segments are searched; segments shorter than 2*n_min are leaves.
[[nodiscard]] ChangePointReport binary_segment(const Matrix& Y, const DetectConfig& cfg);

}  // namespace ncpd
