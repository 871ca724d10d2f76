#include "ncpd/data.hpp"

#include <cmath>
#include <string>

namespace ncpd {

namespace {

// A column is degenerate when its variance is negligible against its scale.
constexpr double kVarianceFloor = 1e-13;

[[noreturn]] void fail_degenerate_column(int col_1based) {
  fail(errc::degenerate,
       "column " + std::to_string(col_1based) + " has zero sample variance in this segment");
}

// Finish a correlation matrix from centered second moments and standard
// deviations: normalize, clamp to [-1, 1], force exact symmetry and unit diagonal.
Matrix finish_correlation(Matrix cov, const Vector& sd) {
  const auto p = cov.rows();
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double r = std::clamp(cov(i, j) / (sd(i) * sd(j)), -1.0, 1.0);
      cov(i, j) = r;
      cov(j, i) = r;
    }
  cov.diagonal().setOnes();
  return cov;
}

}  // namespace

SegmentView full_segment(const Matrix& Y) { return {1, static_cast<int>(Y.rows())}; }

void validate_segment(const SegmentView& seg, int T) {
  if (seg.start < 1 || seg.end > T || seg.start > seg.end)
    fail(errc::bounds, "segment [" + std::to_string(seg.start) + ", " + std::to_string(seg.end) +
                           "] out of range for T=" + std::to_string(T));
  if (seg.length() < 2)
    fail(errc::bounds, "segment [" + std::to_string(seg.start) + ", " + std::to_string(seg.end) +
                           "] has fewer than 2 rows");
}

void validate_series(const Matrix& Y) {
  if (Y.rows() < 2 || Y.cols() < 2)
    fail(errc::dimension, "series must be at least 2x2, got " + std::to_string(Y.rows()) + "x" +
                              std::to_string(Y.cols()));
  if (!Y.allFinite()) fail(errc::parse, "series contains non-finite entries");
}

std::pair<SegmentView, SegmentView> split(int T, int delta) {
  if (delta < 2 || delta > T - 2)
    fail(errc::bounds, "split at " + std::to_string(delta) + " leaves a side shorter than 2 (T=" +
                           std::to_string(T) + ")");
  return {SegmentView{1, delta}, SegmentView{delta + 1, T}};
}

Matrix correlation(const Matrix& Y, const SegmentView& seg) {
  validate_segment(seg, static_cast<int>(Y.rows()));
  return correlation(Y.middleRows(seg.start - 1, seg.length()));
}

Matrix correlation(const Matrix& block) {
  const auto n = block.rows();
  const auto p = block.cols();
  if (n < 2) fail(errc::bounds, "correlation needs at least 2 rows");

  const Matrix centered = block.rowwise() - block.colwise().mean();
  Vector sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double meansq = block.col(j).squaredNorm() / static_cast<double>(n);
    const double var = centered.col(j).squaredNorm() / static_cast<double>(n);
    if (var <= kVarianceFloor * std::max(1.0, meansq)) fail_degenerate_column(static_cast<int>(j) + 1);
    sd(j) = std::sqrt(var);
  }
  Matrix cov = (centered.transpose() * centered) / static_cast<double>(n);
  return finish_correlation(std::move(cov), sd);
}

CorrelationAccumulator::CorrelationAccumulator(int p)
    : sum_(Vector::Zero(p)), sumsq_(Matrix::Zero(p, p)) {
  if (p < 2) fail(errc::dimension, "correlation needs at least 2 columns");
}

void CorrelationAccumulator::add_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  sum_ += x.transpose();
  sumsq_.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), 1.0);
  ++n_;
}

void CorrelationAccumulator::remove_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (n_ == 0) fail(errc::contract, "cannot remove a row from an empty accumulator");
  sum_ -= x.transpose();
  sumsq_.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose(), -1.0);
  --n_;
}

void CorrelationAccumulator::add_rows(const Matrix& Y, int first, int last) {
  for (int t = first; t <= last; ++t) add_row(Y.row(t - 1));
}

Matrix CorrelationAccumulator::correlation() const {
  if (n_ < 2) fail(errc::bounds, "correlation needs at least 2 rows");
  const auto p = sum_.size();
  const double n = static_cast<double>(n_);
  const Vector mean = sum_ / n;

  Matrix cov = Matrix(sumsq_.selfadjointView<Eigen::Lower>()) / n;
  cov.noalias() -= mean * mean.transpose();

  Vector sd(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double meansq = sumsq_(j, j) / n;
    if (cov(j, j) <= kVarianceFloor * std::max(1.0, meansq))
      fail_degenerate_column(static_cast<int>(j) + 1);
    sd(j) = std::sqrt(cov(j, j));
  }
  return finish_correlation(std::move(cov), sd);
}

}  // namespace ncpd
