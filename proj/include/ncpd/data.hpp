#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>

#include "ncpd/error.hpp"

namespace ncpd {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Inclusive 1-based time range [start, end]; the external indexing convention
/// for everything in this library (row 1 = first time point).
struct SegmentView {
  int start = 1;
  int end = 1;
  [[nodiscard]] int length() const noexcept { return end - start + 1; }
  bool operator==(const SegmentView&) const = default;
};

/// Whole-series segment [1, T].
[[nodiscard]] SegmentView full_segment(const Matrix& Y);

/// Throws errc::bounds unless 1 <= start <= end <= T and length >= 2.
void validate_segment(const SegmentView& seg, int T);

/// Throws errc::dimension unless T >= 2 and p >= 2, errc::parse on non-finite entries.
void validate_series(const Matrix& Y);

/// Options for delimited-text ingestion.
struct LoadOptions {
  char delimiter = ',';
  bool header = false;  ///< skip one leading header row
};

/// Read a T x p matrix from a delimited text file; rows are time points.
/// Errors carry 1-based file line and column coordinates.
[[nodiscard]] Matrix load_matrix(const std::filesystem::path& path, const LoadOptions& opts = {});

/// Parse matrix text directly (same rules as load_matrix).
[[nodiscard]] Matrix parse_matrix(const std::string& text, const LoadOptions& opts = {});

/// Split a length-T series at delta: rows [1..delta] and [delta+1..T].
/// Each side needs at least 2 rows, so 2 <= delta <= T-2.
[[nodiscard]] std::pair<SegmentView, SegmentView> split(int T, int delta);

/// Pearson sample correlation of the segment's rows: symmetric, unit diagonal,
/// entries clamped to [-1, 1]. Throws errc::degenerate naming the first
/// zero-variance column (1-based).
[[nodiscard]] Matrix correlation(const Matrix& Y, const SegmentView& seg);

/// Correlation of a whole row block.
[[nodiscard]] Matrix correlation(const Matrix& block);

/// Running first/second moments of a set of rows, supporting O(p^2) add/remove
/// updates. Lets a candidate sweep slide the split point without recomputing
/// each side's correlation from scratch.
class CorrelationAccumulator {
 public:
  explicit CorrelationAccumulator(int p);

  void add_row(const Eigen::Ref<const Eigen::RowVectorXd>& x);
  void remove_row(const Eigen::Ref<const Eigen::RowVectorXd>& x);
  void add_rows(const Matrix& Y, int first, int last);  // 1-based inclusive rows

  [[nodiscard]] int rows() const noexcept { return n_; }

  /// Correlation matrix of the currently held rows (needs n >= 2).
  [[nodiscard]] Matrix correlation() const;

 private:
  int n_ = 0;
  Vector sum_;
  Matrix sumsq_;  // lower triangle maintained; symmetrized on demand
};

}  // namespace ncpd
