#include "ncpd/simulation.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace ncpd {

namespace {

// Equal community sizes, remainder to the lowest-numbered communities;
// contiguous blocks of labels 1..K.
std::vector<int> contiguous_labels(int p, int K) {
  std::vector<int> labels(static_cast<std::size_t>(p));
  const int base = p / K, extra = p % K;
  int i = 0;
  for (int c = 1; c <= K; ++c) {
    const int size = base + (c <= extra ? 1 : 0);
    for (int s = 0; s < size; ++s) labels[static_cast<std::size_t>(i++)] = c;
  }
  return labels;
}

// Apply a uniformly random permutation of node indices to the partition.
std::vector<int> reshuffled(const std::vector<int>& labels, std::mt19937_64& rng) {
  std::vector<int> out = labels;
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

// Nodes of `community`, ascending index.
std::vector<int> members_of(const std::vector<int>& labels, int community) {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i)
    if (labels[static_cast<std::size_t>(i)] == community) idx.push_back(i);
  return idx;
}

int max_label(const std::vector<int>& labels) {
  return *std::max_element(labels.begin(), labels.end());
}

// Move the first `count` members (index order) of `from` to `to`.
void move_first(std::vector<int>& labels, int from, int to, int count) {
  const auto members = members_of(labels, from);
  for (int s = 0; s < count && s < static_cast<int>(members.size()); ++s)
    labels[static_cast<std::size_t>(members[static_cast<std::size_t>(s)])] = to;
}

}  // namespace

std::pair<int, int> setting_defaults(int id) {
  switch (id) {
    case 1: return {400, 200};
    case 2: return {600, 400};
    case 3: return {800, 600};
    default: fail(errc::config, "setting must be 1, 2 or 3, got " + std::to_string(id));
  }
}

SimSetting make_setting(int id, int p, int T, std::mt19937_64& rng) {
  if (id < 1 || id > 3) fail(errc::config, "setting must be 1, 2 or 3, got " + std::to_string(id));
  if (p < 4 || T < 8)
    fail(errc::config, "setting needs p >= 4 and T >= 8, got p=" + std::to_string(p) +
                           ", T=" + std::to_string(T));

  SimSetting s;
  s.id = id;
  s.p = p;
  s.T = T;

  if (id == 1) {
    s.rule = BetweenRule::constant;
    s.true_change_points = {T / 2};
    const auto r0 = contiguous_labels(p, 2);
    s.regimes = {r0, reshuffled(r0, rng)};
    return s;
  }

  if (id == 2) {
    s.rule = BetweenRule::geometric;
    s.true_change_points = {T / 4, T / 2, 3 * T / 4};
    const auto r0 = contiguous_labels(p, 3);

    // Community 3 merged equally into communities 1 and 2.
    auto r1 = r0;
    {
      const auto third = members_of(r1, 3);
      const int half = static_cast<int>(third.size()) / 2;
      for (int s2 = 0; s2 < static_cast<int>(third.size()); ++s2)
        r1[static_cast<std::size_t>(third[static_cast<std::size_t>(s2)])] = s2 < half ? 1 : 2;
    }

    const auto r2 = reshuffled(r1, rng);

    // One third of each community moved into a new community 3.
    auto r3 = r2;
    for (int c = 1; c <= max_label(r2); ++c)
      move_first(r3, c, 3, static_cast<int>(members_of(r2, c).size()) / 3);

    s.regimes = {r0, r1, r2, r3};
    return s;
  }

  // Setting 3: half of each of the two communities swaps sides at every change.
  s.rule = BetweenRule::geometric;
  s.true_change_points = {T / 3, 2 * T / 3};
  const auto r0 = contiguous_labels(p, 2);
  auto half_swap = [](const std::vector<int>& labels) {
    auto out = labels;
    const auto ones = members_of(labels, 1);
    const auto twos = members_of(labels, 2);
    for (int s2 = 0; s2 < static_cast<int>(ones.size()) / 2; ++s2)
      out[static_cast<std::size_t>(ones[static_cast<std::size_t>(s2)])] = 2;
    for (int s2 = 0; s2 < static_cast<int>(twos.size()) / 2; ++s2)
      out[static_cast<std::size_t>(twos[static_cast<std::size_t>(s2)])] = 1;
    return out;
  };
  const auto r1 = half_swap(r0);
  s.regimes = {r0, r1, half_swap(r1)};
  return s;
}

Matrix regime_covariance(const std::vector<int>& labels, double within, double between,
                         BetweenRule rule) {
  const int p = static_cast<int>(labels.size());
  if (p < 2) fail(errc::dimension, "covariance needs at least 2 nodes");

  // Canonical positions: stable sort by (community, index). The geometric decay
  // acts on canonical distance, so relabeled partitions keep the same spectrum
  // (and positive definiteness) as their contiguous counterparts.
  std::vector<int> order(static_cast<std::size_t>(p));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return labels[static_cast<std::size_t>(a)] < labels[static_cast<std::size_t>(b)];
  });
  std::vector<int> q(static_cast<std::size_t>(p));
  for (int pos = 0; pos < p; ++pos) q[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;

  Matrix sigma(p, p);
  for (int i = 0; i < p; ++i) {
    sigma(i, i) = 1.0;
    for (int j = 0; j < i; ++j) {
      double v;
      if (labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)]) {
        v = within;
      } else if (rule == BetweenRule::constant) {
        v = between;
      } else {
        v = std::pow(between, std::abs(q[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(j)]));
      }
      sigma(i, j) = v;
      sigma(j, i) = v;
    }
  }
  return sigma;
}

Matrix generate(const SimSetting& setting, std::mt19937_64& rng) {
  if (setting.regimes.size() != setting.true_change_points.size() + 1)
    fail(errc::config, "regime count must be change-point count + 1");
  for (const auto& labels : setting.regimes)
    if (static_cast<int>(labels.size()) != setting.p)
      fail(errc::config, "every regime must label all p nodes");

  Matrix Y(setting.T, setting.p);
  std::normal_distribution<double> normal(0.0, 1.0);

  int row = 0;
  for (std::size_t r = 0; r < setting.regimes.size(); ++r) {
    const int regime_end =
        r < setting.true_change_points.size() ? setting.true_change_points[r] : setting.T;
    const int rows = regime_end - row;
    if (rows <= 0) fail(errc::config, "change points must be strictly increasing inside (1, T)");

    const Matrix sigma =
        regime_covariance(setting.regimes[r], setting.within, setting.between, setting.rule);
    Eigen::LLT<Matrix> llt(sigma);
    if (llt.info() != Eigen::Success)
      fail(errc::numerical,
           "covariance for regime " + std::to_string(r + 1) + " is not positive definite");
    const Matrix chol_t = Matrix(llt.matrixL()).transpose();  // upper triangular

    Matrix G(rows, setting.p);
    for (int t = 0; t < rows; ++t)
      for (int j = 0; j < setting.p; ++j) G(t, j) = normal(rng);
    Y.middleRows(row, rows).noalias() = G * chol_t;
    row = regime_end;
  }
  return Y;
}

RunEvaluation evaluate(const std::vector<int>& detections, const SimSetting& setting, int n_min) {
  constexpr int kWindow = 10;  // a detection within +-10 of a truth is a true positive

  struct Pair {
    int dist, det_idx, truth_idx;
  };
  std::vector<Pair> pairs;
  for (int d = 0; d < static_cast<int>(detections.size()); ++d)
    for (int t = 0; t < static_cast<int>(setting.true_change_points.size()); ++t) {
      const int dist = std::abs(detections[static_cast<std::size_t>(d)] -
                                setting.true_change_points[static_cast<std::size_t>(t)]);
      if (dist <= kWindow) pairs.push_back({dist, d, t});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    if (a.det_idx != b.det_idx) return a.det_idx < b.det_idx;
    return a.truth_idx < b.truth_idx;
  });

  std::vector<char> det_used(detections.size(), 0), truth_used(setting.true_change_points.size(), 0);
  RunEvaluation ev;
  for (const auto& pr : pairs) {
    if (det_used[static_cast<std::size_t>(pr.det_idx)] || truth_used[static_cast<std::size_t>(pr.truth_idx)]) continue;
    det_used[static_cast<std::size_t>(pr.det_idx)] = 1;
    truth_used[static_cast<std::size_t>(pr.truth_idx)] = 1;
    ev.matches.emplace_back(setting.true_change_points[static_cast<std::size_t>(pr.truth_idx)],
                            detections[static_cast<std::size_t>(pr.det_idx)]);
  }
  std::sort(ev.matches.begin(), ev.matches.end());

  for (int d = 0; d < static_cast<int>(detections.size()); ++d) {
    if (det_used[static_cast<std::size_t>(d)]) continue;
    const int pos = detections[static_cast<std::size_t>(d)];
    ev.false_positives.push_back(pos);
    // The edge phenomenon: discount FPs within 10 of the candidate window edges.
    const bool near_edge =
        std::abs(pos - n_min) <= kWindow || std::abs(pos - (setting.T - n_min)) <= kWindow;
    if (!near_edge) ev.modified_false_positives.push_back(pos);
  }
  return ev;
}

SimMetrics aggregate(const std::vector<RunEvaluation>& runs, const SimSetting& setting) {
  const auto num_cps = setting.true_change_points.size();
  SimMetrics m;
  m.reps = static_cast<int>(runs.size());
  m.tp_mean.assign(num_cps, std::numeric_limits<double>::quiet_NaN());
  m.tp_se.assign(num_cps, std::numeric_limits<double>::quiet_NaN());
  m.tp_count.assign(num_cps, 0);

  std::vector<std::vector<double>> matched(num_cps);
  long tp_total = 0, fp_total = 0, mod_fp_total = 0;
  for (const auto& run : runs) {
    tp_total += static_cast<long>(run.matches.size());
    fp_total += static_cast<long>(run.false_positives.size());
    mod_fp_total += static_cast<long>(run.modified_false_positives.size());
    for (const auto& [truth, det] : run.matches) {
      const auto it = std::find(setting.true_change_points.begin(),
                                setting.true_change_points.end(), truth);
      matched[static_cast<std::size_t>(it - setting.true_change_points.begin())].push_back(det);
    }
  }

  for (std::size_t k = 0; k < num_cps; ++k) {
    const auto& xs = matched[k];
    m.tp_count[k] = static_cast<int>(xs.size());
    if (xs.empty()) continue;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    m.tp_mean[k] = mean;
    if (xs.size() >= 2) {
      double ss = 0.0;
      for (double x : xs) ss += (x - mean) * (x - mean);
      const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
      m.tp_se[k] = sd / std::sqrt(static_cast<double>(xs.size()));
    }
  }

  if (m.reps > 0) {
    m.tp_freq = static_cast<double>(tp_total) / m.reps;
    m.fp_freq = static_cast<double>(fp_total) / m.reps;
    m.mod_fp_freq = static_cast<double>(mod_fp_total) / m.reps;
  }
  return m;
}

DensityCurve density(const std::vector<int>& detections, double bandwidth, double lo, double hi,
                     int n) {
  if (n < 2) fail(errc::config, "density grid needs at least 2 points");
  if (!(hi > lo)) fail(errc::config, "density grid needs hi > lo");

  DensityCurve curve;
  if (detections.empty()) {
    curve.empty = true;
    return curve;
  }

  const auto nd = static_cast<double>(detections.size());
  double h = bandwidth;
  if (h <= 0.0) {
    // Silverman's rule: 0.9 * min(sd, IQR/1.34) * n^(-1/5); fallback 1.0 when flat.
    const double mean =
        std::accumulate(detections.begin(), detections.end(), 0.0) / nd;
    double ss = 0.0;
    for (int x : detections) ss += (x - mean) * (x - mean);
    const double sd = nd > 1 ? std::sqrt(ss / (nd - 1)) : 0.0;
    std::vector<int> sorted(detections);
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
      const double pos = q * (nd - 1);
      const auto i = static_cast<std::size_t>(pos);
      const double frac = pos - static_cast<double>(i);
      const double a = sorted[i];
      const double b = sorted[std::min(i + 1, sorted.size() - 1)];
      return a + frac * (b - a);
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    h = spread > 0.0 ? 0.9 * spread * std::pow(nd, -0.2) : 1.0;
  }
  curve.bandwidth = h;

  curve.grid.resize(static_cast<std::size_t>(n));
  curve.density.resize(static_cast<std::size_t>(n));
  const double step = (hi - lo) / (n - 1);
  const double norm = 1.0 / (nd * h * std::sqrt(2.0 * M_PI));
  for (int i = 0; i < n; ++i) {
    const double x = lo + step * i;
    double acc = 0.0;
    for (int d : detections) {
      const double z = (x - d) / h;
      acc += std::exp(-0.5 * z * z);
    }
    curve.grid[static_cast<std::size_t>(i)] = x;
    curve.density[static_cast<std::size_t>(i)] = acc * norm;
  }

  // Renormalize so the trapezoid integral over the grid is exactly 1.
  double integral = 0.0;
  for (int i = 0; i + 1 < n; ++i)
    integral += 0.5 * (curve.density[static_cast<std::size_t>(i)] + curve.density[static_cast<std::size_t>(i + 1)]) * step;
  if (integral > 0.0)
    for (auto& v : curve.density) v /= integral;
  return curve;
}

}  // namespace ncpd
