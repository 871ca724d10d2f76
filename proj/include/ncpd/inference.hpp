#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

#include "ncpd/data.hpp"

namespace ncpd {

enum class ResampleMode { stationary, permutation };

struct BootstrapConfig {
  int num_resamples = 1000;
  int mean_block_length = 0;  ///< 0 = auto: max(2, ceil(0.2 * segment length))
  double alpha = 0.05;
  ResampleMode mode = ResampleMode::stationary;
  std::uint64_t seed = 0;
  int retry_cap = 10;  ///< redraws allowed per resample slot on degenerate data
};

/// Bootstrap null distribution of gamma at a fixed candidate.
struct NullDistribution {
  std::vector<double> gamma_samples;  ///< length num_resamples, draw order
  double c_alpha = 0.0;               ///< ceil(alpha*B)-th order statistic
};

struct TestResult {
  double gamma_observed = 0.0;
  NullDistribution null;
  bool significant = false;  ///< gamma_observed < c_alpha (strict)
};

/// Materialize the 1-based row indices selected by the given stationary
/// bootstrap blocks (start, length): consecutive rows with circular
/// wraparound, concatenated and truncated to T_s. Exposed for direct testing.
[[nodiscard]] std::vector<int> stationary_indices(
    int T_s, const std::vector<std::pair<int, int>>& blocks);

/// Stationary bootstrap pseudo-sample of the segment's rows: block lengths
/// i.i.d. Geometric(block_prob) on {1,2,...} (mean 1/block_prob), starts
/// uniform on {1..T_s}, circular wraparound, truncated to T_s rows.
[[nodiscard]] Matrix stationary_resample(const Matrix& segment, double block_prob,
                                         std::mt19937_64& rng);

/// Uniformly random permutation of the segment's rows (columns intact).
[[nodiscard]] Matrix permutation_resample(const Matrix& segment, std::mt19937_64& rng);

/// Lower empirical quantile: the ceil(alpha*n)-th order statistic.
[[nodiscard]] double quantile_order_stat(std::vector<double> samples, double alpha);

/// Criterion evaluator on a row block split at a local 1-based delta.
using GammaFn = std::function<double(const Matrix& rows, int delta_local)>;

/// Significance test of a candidate split: recompute gamma at the same delta on
/// num_resamples pseudo-samples of the whole segment; the candidate is
/// significant when the observed gamma falls below the alpha-quantile of that
/// null. Degenerate pseudo-samples are redrawn up to retry_cap times each;
/// exceeding the cap raises errc::inference.
[[nodiscard]] TestResult test_change_point(const Matrix& segment_rows, int delta_local,
                                           const GammaFn& gamma_fn, const BootstrapConfig& cfg,
                                           int threads = 1);

}  // namespace ncpd
