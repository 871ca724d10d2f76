#include "ncpd/detection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ncpd/criterion.hpp"
#include "ncpd/parallel.hpp"
#include "ncpd/rng.hpp"
#include "ncpd/spectral.hpp"

namespace ncpd {

namespace {

constexpr std::uint64_t kLeftSide = 1, kRightSide = 2;

// Gamma between two correlation matrices under the configured basis. The
// k-means seeds for the centroid basis are a pure function of (seed, segment,
// candidate, side), so sweep, report and re-evaluation all agree exactly.
double gamma_of_sides(const Matrix& Rl, const Matrix& Rr, const DetectConfig& cfg,
                      const SegmentView& seg, int delta_global) {
  auto side_embedding = [&](const Matrix& R) {
    return embed(laplacian(cfg.absolute_weights ? Matrix(R.cwiseAbs()) : R), cfg.K);
  };
  const Embedding VL = side_embedding(Rl);
  const Embedding VR = side_embedding(Rr);
  if (cfg.basis == CriterionBasis::embedding)
    return gamma_similarity(VL.vectors, VR.vectors).gamma;

  auto side_seed = [&](std::uint64_t side) {
    return derive_seed(cfg.seed,
                       {static_cast<std::uint64_t>(seg.start), static_cast<std::uint64_t>(seg.end),
                        static_cast<std::uint64_t>(delta_global), side});
  };
  const Matrix UL = centroid_expand(kmeans(VL.vectors, cfg.K, cfg.kmeans, side_seed(kLeftSide)));
  const Matrix UR = centroid_expand(kmeans(VR.vectors, cfg.K, cfg.kmeans, side_seed(kRightSide)));
  return gamma_similarity(UL, UR).gamma;
}

void validate_config(const DetectConfig& cfg, int p) {
  if (cfg.K < 2) fail(errc::config, "K must be at least 2, got " + std::to_string(cfg.K));
  if (cfg.K > p)
    fail(errc::config, "K=" + std::to_string(cfg.K) + " exceeds the node count p=" + std::to_string(p));
  if (cfg.n_min < 2) fail(errc::config, "n_min must be at least 2, got " + std::to_string(cfg.n_min));
  if (!(cfg.alpha > 0.0) || !(cfg.alpha < 1.0))
    fail(errc::config, "alpha must lie in (0, 1), got " + std::to_string(cfg.alpha));
  if (cfg.resamples < 1) fail(errc::config, "need at least 1 resample");
  if (cfg.mean_block_length < 0) fail(errc::config, "mean block length cannot be negative");
  if (cfg.mean_block_length == 0 && (!(cfg.block_frac > 0.0) || cfg.block_frac > 1.0))
    fail(errc::config, "block fraction must lie in (0, 1], got " + std::to_string(cfg.block_frac));
}

int segment_block_length(const DetectConfig& cfg, int segment_length) {
  if (cfg.mean_block_length > 0) return std::min(cfg.mean_block_length, segment_length);
  return std::max(2, static_cast<int>(std::ceil(cfg.block_frac * segment_length)));
}

}  // namespace

double gamma_at(const Matrix& Y, const SegmentView& seg, int delta_global,
                const DetectConfig& cfg) {
  validate_segment(seg, static_cast<int>(Y.rows()));
  if (delta_global < seg.start + 1 || delta_global > seg.end - 2)
    fail(errc::bounds, "split at " + std::to_string(delta_global) +
                           " leaves a side shorter than 2 within the segment");
  const Matrix Rl = correlation(Y, {seg.start, delta_global});
  const Matrix Rr = correlation(Y, {delta_global + 1, seg.end});
  return gamma_of_sides(Rl, Rr, cfg, seg, delta_global);
}

CandidateSeries sweep(const Matrix& Y, const SegmentView& seg, const DetectConfig& cfg) {
  const int T = static_cast<int>(Y.rows());
  const int p = static_cast<int>(Y.cols());
  validate_segment(seg, T);
  validate_config(cfg, p);
  const int len = seg.length();
  if (len < 2 * cfg.n_min)
    fail(errc::dimension, "segment of length " + std::to_string(len) +
                              " admits no candidate (needs 2*n_min = " +
                              std::to_string(2 * cfg.n_min) + ")");

  const int first = seg.start + cfg.n_min - 1;
  const int last = seg.end - cfg.n_min;
  const int m = last - first + 1;  // = len - 2*n_min + 1

  CandidateSeries series;
  series.positions.resize(static_cast<std::size_t>(m));
  std::iota(series.positions.begin(), series.positions.end(), first);
  series.gammas.assign(static_cast<std::size_t>(m), 0.0);

  const int threads = resolve_threads(cfg.threads);
  parallel_chunks(m, threads, [&](std::int64_t lo, std::int64_t hi) {
    // Each chunk slides its own split point; moving the boundary one row costs
    // O(p^2) instead of a full correlation pass.
    CorrelationAccumulator left(p), right(p);
    left.add_rows(Y, seg.start, first + static_cast<int>(lo));
    right.add_rows(Y, first + static_cast<int>(lo) + 1, seg.end);
    for (std::int64_t j = lo; j < hi; ++j) {
      const int delta = first + static_cast<int>(j);
      if (j > lo) {
        left.add_row(Y.row(delta - 1));
        right.remove_row(Y.row(delta - 1));
      }
      try {
        series.gammas[static_cast<std::size_t>(j)] =
            gamma_of_sides(left.correlation(), right.correlation(), cfg, seg, delta);
      } catch (const error& e) {
        fail(e.code(), std::string(e.what()) + " (candidate " + std::to_string(delta) + ")");
      }
    }
  });

  detect_outliers(series);
  return series;
}

void detect_outliers(CandidateSeries& series) {
  const int m = series.size();
  if (m < 1) fail(errc::bounds, "empty candidate series");
  series.eta.assign(static_cast<std::size_t>(m), 0.0);
  series.outlier_mask.assign(static_cast<std::size_t>(m), 0);
  series.mask_warning = false;

  if (m == 1) {  // nothing to compare against; flag instead of masking
    series.mask_warning = true;
    return;
  }

  // Local roughness: one-sided at the endpoints, max of both jumps inside.
  const auto& g = series.gammas;
  for (int j = 0; j < m; ++j) {
    const double left = j > 0 ? std::abs(g[static_cast<std::size_t>(j)] - g[static_cast<std::size_t>(j - 1)]) : -1.0;
    const double right =
        j < m - 1 ? std::abs(g[static_cast<std::size_t>(j)] - g[static_cast<std::size_t>(j + 1)]) : -1.0;
    series.eta[static_cast<std::size_t>(j)] = std::max(left, right);
  }

  const int n_mask = static_cast<int>(std::ceil(0.05 * m));
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double ea = series.eta[static_cast<std::size_t>(a)];
    const double eb = series.eta[static_cast<std::size_t>(b)];
    if (ea != eb) return ea > eb;  // larger eta first
    return a < b;                  // then lower index
  });
  for (int r = 0; r < n_mask; ++r) series.outlier_mask[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = 1;
}

int best_candidate(const CandidateSeries& series) {
  int best = -1;
  for (int j = 0; j < series.size(); ++j) {
    if (series.outlier_mask[static_cast<std::size_t>(j)]) continue;
    if (best < 0 || series.gammas[static_cast<std::size_t>(j)] < series.gammas[static_cast<std::size_t>(best)])
      best = j;  // strict <: equal gammas keep the earlier position
  }
  if (best < 0) fail(errc::contract, "every candidate is masked");
  return series.positions[static_cast<std::size_t>(best)];
}

ChangePointReport binary_segment(const Matrix& Y, const DetectConfig& cfg_in) {
  validate_series(Y);
  const int T = static_cast<int>(Y.rows());
  const int p = static_cast<int>(Y.cols());
  validate_config(cfg_in, p);
  if (T < 2 * cfg_in.n_min)
    fail(errc::dimension, "series of length " + std::to_string(T) +
                              " is shorter than 2*n_min = " + std::to_string(2 * cfg_in.n_min));

  DetectConfig cfg = cfg_in;
  cfg.threads = resolve_threads(cfg_in.threads);

  ChangePointReport report;
  report.T = T;
  report.p = p;

  std::vector<SegmentView> work{full_segment(Y)};
  while (!work.empty()) {
    const SegmentView seg = work.back();
    work.pop_back();
    if (seg.length() < 2 * cfg.n_min) continue;  // leaf: no admissible candidate

    try {
      CandidateSeries trace = sweep(Y, seg, cfg);
      const int pos = best_candidate(trace);

      const Matrix segment_rows = Y.middleRows(seg.start - 1, seg.length());
      const GammaFn gamma_fn = [&cfg, seg](const Matrix& rows, int delta_local) {
        const int n = static_cast<int>(rows.rows());
        const Matrix Rl = correlation(rows.topRows(delta_local));
        const Matrix Rr = correlation(rows.bottomRows(n - delta_local));
        return gamma_of_sides(Rl, Rr, cfg, seg, seg.start - 1 + delta_local);
      };

      BootstrapConfig boot;
      boot.num_resamples = cfg.resamples;
      boot.mean_block_length = segment_block_length(cfg, seg.length());
      boot.alpha = cfg.alpha;
      boot.mode = cfg.mode;
      boot.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(seg.start),
                                         static_cast<std::uint64_t>(seg.end)});
      const TestResult tr =
          test_change_point(segment_rows, pos - seg.start + 1, gamma_fn, boot, cfg.threads);

      SegmentTest st;
      st.segment = seg;
      st.candidate = pos;
      st.gamma_observed = tr.gamma_observed;
      st.c_alpha = tr.null.c_alpha;
      st.significant = tr.significant;
      st.resamples = cfg.resamples;
      {
        std::vector<double> sorted = tr.null.gamma_samples;
        std::sort(sorted.begin(), sorted.end());
        st.null_min = sorted.front();
        st.null_max = sorted.back();
        st.null_median = sorted[sorted.size() / 2];
      }
      st.num_candidates = trace.size();
      st.num_masked = static_cast<int>(
          std::count(trace.outlier_mask.begin(), trace.outlier_mask.end(), char(1)));
      st.near_edge = pos <= cfg.n_min + 10 || pos >= T - cfg.n_min - 10;
      st.mask_warning = trace.mask_warning;

      report.tests.push_back(st);
      report.traces.push_back(std::move(trace));

      if (st.significant) {
        report.change_points.push_back(pos);
        work.push_back({pos + 1, seg.end});  // pushed first, processed after the left child
        work.push_back({seg.start, pos});
      }
    } catch (const error& e) {
      // Data-dependent trouble abandons this branch only; misuse propagates.
      if (e.code() == errc::degenerate || e.code() == errc::numerical ||
          e.code() == errc::inference) {
        report.failures.push_back({seg, e.what()});
        continue;
      }
      throw;
    }
  }

  std::sort(report.change_points.begin(), report.change_points.end());
  return report;
}

}  // namespace ncpd
