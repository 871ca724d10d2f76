#include "ncpd/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ncpd/parallel.hpp"
#include "ncpd/rng.hpp"

namespace ncpd {

std::vector<int> stationary_indices(int T_s, const std::vector<std::pair<int, int>>& blocks) {
  if (T_s < 1) fail(errc::bounds, "segment length must be positive");
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(T_s));
  for (const auto& [start, len] : blocks) {
    if (start < 1 || start > T_s) fail(errc::bounds, "block start outside {1..T_s}");
    if (len < 1) fail(errc::bounds, "block length must be at least 1");
    for (int u = 0; u < len && rows.size() < static_cast<std::size_t>(T_s); ++u) {
      int j = start + u;
      j = ((j - 1) % T_s) + 1;  // circular: index j > T_s wraps to j mod T_s, 0 -> T_s
      rows.push_back(j);
    }
    if (rows.size() == static_cast<std::size_t>(T_s)) break;
  }
  if (rows.size() < static_cast<std::size_t>(T_s))
    fail(errc::contract, "blocks cover fewer rows than the segment");
  return rows;
}

Matrix stationary_resample(const Matrix& segment, double block_prob, std::mt19937_64& rng) {
  const int T_s = static_cast<int>(segment.rows());
  if (T_s < 2) fail(errc::bounds, "resampling needs at least 2 rows");
  if (!(block_prob > 0.0) || block_prob > 1.0)
    fail(errc::config, "block probability must lie in (0, 1], got " + std::to_string(block_prob));

  // Geometric block lengths on {1,2,...} with mean 1/p: std::geometric_distribution
  // counts failures before the first success, so shift by one.
  std::geometric_distribution<int> geometric(block_prob);
  std::vector<std::pair<int, int>> blocks;
  long total = 0;
  while (total < T_s) {
    const int len = geometric(rng) + 1;
    blocks.emplace_back(0, len);
    total += len;
  }
  std::uniform_int_distribution<int> uniform(1, T_s);
  for (auto& b : blocks) b.first = uniform(rng);

  const auto rows = stationary_indices(T_s, blocks);
  Matrix out(T_s, segment.cols());
  for (int t = 0; t < T_s; ++t) out.row(t) = segment.row(rows[static_cast<std::size_t>(t)] - 1);
  return out;
}

Matrix permutation_resample(const Matrix& segment, std::mt19937_64& rng) {
  const int T_s = static_cast<int>(segment.rows());
  if (T_s < 2) fail(errc::bounds, "resampling needs at least 2 rows");
  std::vector<int> order(static_cast<std::size_t>(T_s));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix out(T_s, segment.cols());
  for (int t = 0; t < T_s; ++t) out.row(t) = segment.row(order[static_cast<std::size_t>(t)]);
  return out;
}

double quantile_order_stat(std::vector<double> samples, double alpha) {
  if (samples.empty()) fail(errc::bounds, "quantile of an empty sample");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    fail(errc::config, "alpha must lie in (0, 1), got " + std::to_string(alpha));
  std::sort(samples.begin(), samples.end());
  const auto n = samples.size();
  auto idx = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n)));
  idx = std::clamp<std::size_t>(idx, 1, n);
  return samples[idx - 1];
}

TestResult test_change_point(const Matrix& segment_rows, int delta_local, const GammaFn& gamma_fn,
                             const BootstrapConfig& cfg, int threads) {
  const int T_s = static_cast<int>(segment_rows.rows());
  if (delta_local < 2 || delta_local > T_s - 2)
    fail(errc::bounds, "candidate " + std::to_string(delta_local) +
                           " leaves a side shorter than 2 (segment length " +
                           std::to_string(T_s) + ")");
  if (cfg.num_resamples < 1) fail(errc::config, "need at least 1 resample");
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
    fail(errc::config, "alpha must lie in (0, 1), got " + std::to_string(cfg.alpha));
  if (cfg.mean_block_length < 0 || cfg.mean_block_length > T_s)
    fail(errc::config, "mean block length must lie in [1, segment length=" + std::to_string(T_s) +
                           "], got " + std::to_string(cfg.mean_block_length));

  // Block-length rule: explicit value, or the 20%-of-the-segment default.
  const int block_len = cfg.mean_block_length > 0
                            ? cfg.mean_block_length
                            : std::max(2, static_cast<int>(std::ceil(0.2 * T_s)));
  const double block_prob = 1.0 / static_cast<double>(block_len);

  TestResult result;
  result.gamma_observed = gamma_fn(segment_rows, delta_local);
  result.null.gamma_samples.assign(static_cast<std::size_t>(cfg.num_resamples), 0.0);

  parallel_for(cfg.num_resamples, threads, [&](std::int64_t b) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > cfg.retry_cap)
        fail(errc::inference, "resample " + std::to_string(b) + " stayed degenerate after " +
                                  std::to_string(cfg.retry_cap) + " redraws");
      auto rng = make_rng(derive_seed(
          cfg.seed, {static_cast<std::uint64_t>(b), static_cast<std::uint64_t>(attempt)}));
      const Matrix pseudo = cfg.mode == ResampleMode::stationary
                                ? stationary_resample(segment_rows, block_prob, rng)
                                : permutation_resample(segment_rows, rng);
      try {
        result.null.gamma_samples[static_cast<std::size_t>(b)] = gamma_fn(pseudo, delta_local);
        return;
      } catch (const error& e) {
        if (e.code() != errc::degenerate) throw;  // only degeneracy earns a redraw
      }
    }
  });

  result.null.c_alpha = quantile_order_stat(result.null.gamma_samples, cfg.alpha);
  result.significant = result.gamma_observed < result.null.c_alpha;
  return result;
}

}  // namespace ncpd
