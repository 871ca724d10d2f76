#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ncpd/data.hpp"

namespace ncpd {

enum class BetweenRule { constant, geometric };

/// One synthetic experiment: a piecewise-stationary Gaussian series whose
/// community structure changes at the true change points.
struct SimSetting {
  int id = 1;  ///< 1, 2 or 3
  int p = 0, T = 0;
  std::vector<int> true_change_points;        ///< sorted, 1-based
  std::vector<std::vector<int>> regimes;      ///< per-regime labels (1-based ids), length p
  double within = 0.75;                       ///< same-community covariance
  double between = 0.20;                      ///< cross-community base value
  BetweenRule rule = BetweenRule::constant;   ///< constant or geometric decay
};

/// Default (p, T) for each setting id.
[[nodiscard]] std::pair<int, int> setting_defaults(int id);

/// Build a setting's label schedule. Setting 1: two equal communities, labels
/// randomly reshuffled at T/2 (constant 0.20 between). Setting 2: changes at
/// T/4, T/2, 3T/4 with community count 3 -> 2 (third community merged equally
/// into the other two) -> 2 (random reshuffle) -> 3 (first third of each
/// community moved to a new one). Setting 3: changes at T/3, 2T/3; the first
/// half of each of the two communities swaps sides at every change. Settings 2
/// and 3 use geometric 0.20^distance decay between communities.
[[nodiscard]] SimSetting make_setting(int id, int p, int T, std::mt19937_64& rng);

/// Covariance for one regime: within-community entries 0.75, unit diagonal,
/// cross-community entries 0.20 (constant rule) or 0.20^|q_i - q_j| (geometric
/// rule) where q orders nodes by (community, index) so the matrix stays
/// positive definite for any label arrangement.
[[nodiscard]] Matrix regime_covariance(const std::vector<int>& labels, double within,
                                       double between, BetweenRule rule);

/// Draw the T x p series: rows i.i.d. N(0, Sigma_regime) within each regime,
/// concatenated at the true change points. Throws errc::numerical naming the
/// regime if a covariance fails its Cholesky factorization.
[[nodiscard]] Matrix generate(const SimSetting& setting, std::mt19937_64& rng);

/// Per-run detection bookkeeping against the planted truth.
struct RunEvaluation {
  std::vector<std::pair<int, int>> matches;       ///< (true cp, detection), within +-10
  std::vector<int> false_positives;               ///< unmatched detections
  std::vector<int> modified_false_positives;      ///< FPs not within 10 of n_min or T-n_min
};

/// Match detections to true change points (nearest-first greedy, each truth
/// consumed once, +-10 window); classify the rest.
[[nodiscard]] RunEvaluation evaluate(const std::vector<int>& detections, const SimSetting& setting,
                                     int n_min);

/// Aggregate over repetitions: per-CP matched-location mean and standard
/// error, plus average counts per run.
struct SimMetrics {
  std::vector<double> tp_mean;  ///< per true CP; NaN when never matched
  std::vector<double> tp_se;    ///< standard error; NaN when <2 matches
  std::vector<int> tp_count;
  double tp_freq = 0.0;
  double fp_freq = 0.0;
  double mod_fp_freq = 0.0;
  int reps = 0;
};

[[nodiscard]] SimMetrics aggregate(const std::vector<RunEvaluation>& runs,
                                   const SimSetting& setting);

/// Gaussian kernel density of detected change points on a uniform grid over
/// [lo, hi], renormalized to integrate to 1 (trapezoid rule). bandwidth <= 0
/// selects Silverman's rule (fallback 1.0 for degenerate samples).
struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;
  bool empty = false;  ///< no detections: curve omitted
};

[[nodiscard]] DensityCurve density(const std::vector<int>& detections, double bandwidth,
                                   double lo, double hi, int n);

}  // namespace ncpd
