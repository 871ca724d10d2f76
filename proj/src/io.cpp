#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "ncpd/data.hpp"

namespace ncpd {

namespace {

// Parse one numeric cell; the whole trimmed cell must be consumed.
double parse_cell(const std::string& cell, int line_1based, int col_1based) {
  std::size_t lo = 0, hi = cell.size();
  while (lo < hi && std::isspace(static_cast<unsigned char>(cell[lo]))) ++lo;
  while (hi > lo && std::isspace(static_cast<unsigned char>(cell[hi - 1]))) --hi;
  const std::string trimmed = cell.substr(lo, hi - lo);
  if (trimmed.empty())
    fail(errc::parse, "empty cell at row " + std::to_string(line_1based) + ", column " +
                          std::to_string(col_1based));
  char* end = nullptr;
  const double v = std::strtod(trimmed.c_str(), &end);
  if (end != trimmed.c_str() + trimmed.size())
    fail(errc::parse, "non-numeric cell '" + trimmed + "' at row " + std::to_string(line_1based) +
                          ", column " + std::to_string(col_1based));
  return v;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = line.find(delim, pos);
    if (next == std::string::npos) {
      cells.push_back(line.substr(pos));
      break;
    }
    cells.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return cells;
}

}  // namespace

Matrix parse_matrix(const std::string& text, const LoadOptions& opts) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  std::size_t width = 0;
  bool header_pending = opts.header;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;  // skip blank lines
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split_line(line, opts.delimiter);
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      fail(errc::parse, "ragged row " + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      row.push_back(parse_cell(cells[j], line_no, static_cast<int>(j) + 1));
    rows.push_back(std::move(row));
  }

  if (rows.size() < 2 || width < 2)
    fail(errc::dimension, "matrix must be at least 2x2, got " + std::to_string(rows.size()) + "x" +
                              std::to_string(width));

  Matrix Y(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j) Y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  validate_series(Y);
  return Y;
}

Matrix load_matrix(const std::filesystem::path& path, const LoadOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::parse, "cannot open input file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_matrix(buf.str(), opts);
}

}  // namespace ncpd
