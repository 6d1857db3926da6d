#include "tcor/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string_view>

namespace tcor {

static_assert(std::endian::native == std::endian::little,
              "binary matrix format assumes a little-endian host");

namespace {

void check_min_dims(Index m, Index n) {
  if (m < 2 || n < 2) {
    std::ostringstream os;
    os << "matrix must have at least 2 rows and 2 columns, got " << m << "x"
       << n;
    throw ValidationError(os.str());
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_cell(std::string_view cell, std::size_t row, std::size_t col) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || cell.empty()) {
    std::ostringstream os;
    os << "cannot parse cell '" << std::string(cell) << "' at row " << row
       << ", column " << col;
    throw ParseError(os.str());
  }
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "non-finite value '" << std::string(cell) << "' at row " << row
       << ", column " << col;
    throw ValidationError(os.str());
  }
  return value;
}

struct StatsScan {
  ColumnStats stats;
  std::vector<Index> constant;  // columns with centered norm <= eps
};

StatsScan scan_stats(const DataMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  StatsScan out;
  out.stats.means = a.values.colwise().mean();
  out.stats.centered_norms.resize(n);
  double max_norm2 = 0.0;
  for (Index j = 0; j < n; ++j) {
    max_norm2 = std::max(max_norm2, a.values.col(j).squaredNorm());
    // Second pass over the column rather than the sum-of-squares shortcut:
    // no cancellation, and the exact-correlation kernel accumulates the
    // same quantity the same way, so the two stay consistent to the bit.
    const double z = out.stats.means[j];
    const double* col = a.values.col(j).data();
    double cn2 = 0.0;
    for (Index r = 0; r < m; ++r) {
      const double c = col[r] - z;
      cn2 += c * c;
    }
    out.stats.centered_norms[j] = std::sqrt(cn2);
  }
  const double eps = 1e-12 * std::sqrt(max_norm2);
  for (Index j = 0; j < n; ++j) {
    if (out.stats.centered_norms[j] <= eps) out.constant.push_back(j);
  }
  return out;
}

}  // namespace

DataMatrix load_csv(const std::string& path, bool has_header, bool transpose) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::string contents((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());

  std::vector<double> cells;
  std::size_t ncols = 0;
  std::size_t nrows = 0;
  std::size_t file_row = 0;

  std::size_t pos = 0;
  bool header_pending = has_header;
  while (pos < contents.size()) {
    std::size_t eol = contents.find('\n', pos);
    std::string_view line(contents.data() + pos,
                          (eol == std::string::npos ? contents.size() : eol) -
                              pos);
    pos = (eol == std::string::npos) ? contents.size() : eol + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++file_row;
    if (trim(line).empty()) {
      if (pos >= contents.size()) break;  // trailing blank line
      throw ParseError("empty row " + std::to_string(file_row));
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }

    std::size_t col = 0;
    std::size_t start = 0;
    while (true) {
      std::size_t comma = line.find(',', start);
      std::string_view cell =
          line.substr(start, comma == std::string_view::npos ? line.size() -
                                                                   start
                                                             : comma - start);
      ++col;
      cells.push_back(parse_cell(cell, file_row, col));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (ncols == 0) {
      ncols = col;
    } else if (col != ncols) {
      std::ostringstream os;
      os << "ragged row " << file_row << ": expected " << ncols
         << " columns, found " << col;
      throw ParseError(os.str());
    }
    ++nrows;
  }

  if (nrows == 0 || ncols == 0) throw ParseError("'" + path + "' has no data");

  DataMatrix a;
  a.values.resize(static_cast<Index>(nrows), static_cast<Index>(ncols));
  for (std::size_t r = 0; r < nrows; ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      a.values(static_cast<Index>(r), static_cast<Index>(c)) =
          cells[r * ncols + c];
    }
  }
  if (transpose) a.values = a.values.transpose().eval();
  check_min_dims(a.rows(), a.cols());
  return a;
}

DataMatrix load_binary(const std::string& path, Index m, Index n) {
  if (m < 1 || n < 1) throw ConfigError("binary dimensions must be positive");
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw IoError("cannot stat '" + path + "': " + ec.message());
  const std::uintmax_t expected = static_cast<std::uintmax_t>(m) *
                                  static_cast<std::uintmax_t>(n) *
                                  sizeof(double);
  if (size != expected) {
    std::ostringstream os;
    os << "'" << path << "' is " << size << " bytes, expected " << expected
       << " for a " << m << "x" << n << " matrix";
    throw IoError(os.str());
  }

  DataMatrix a;
  a.values.resize(m, n);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  in.read(reinterpret_cast<char*>(a.values.data()),
          static_cast<std::streamsize>(expected));
  if (!in) throw IoError("short read from '" + path + "'");

  if (!a.values.allFinite()) {
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < m; ++i) {
        if (!std::isfinite(a.values(i, j))) {
          std::ostringstream os;
          os << "non-finite value at row " << (i + 1) << ", column " << (j + 1);
          throw ValidationError(os.str());
        }
      }
    }
  }
  check_min_dims(m, n);
  return a;
}

void save_binary(const DataMatrix& a, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(a.values.data()),
            static_cast<std::streamsize>(sizeof(double)) * a.rows() * a.cols());
  if (!out) throw IoError("short write to '" + path + "'");
}

ColumnStats column_stats(const DataMatrix& a) {
  check_min_dims(a.rows(), a.cols());
  StatsScan scan = scan_stats(a);
  if (!scan.constant.empty()) {
    std::ostringstream os;
    os << "constant column(s):";
    for (Index j : scan.constant) os << " " << (j + 1);
    os << " (1-based)";
    throw ConstantColumnError(os.str(), std::move(scan.constant));
  }
  return std::move(scan.stats);
}

std::pair<DataMatrix, std::vector<Index>> drop_constant_columns(
    const DataMatrix& a) {
  check_min_dims(a.rows(), a.cols());
  StatsScan scan = scan_stats(a);
  std::vector<Index> kept;
  kept.reserve(a.cols());
  std::size_t next_bad = 0;
  for (Index j = 0; j < a.cols(); ++j) {
    if (next_bad < scan.constant.size() && scan.constant[next_bad] == j) {
      ++next_bad;
    } else {
      kept.push_back(j);
    }
  }
  if (kept.empty()) {
    throw AllColumnsConstantError("every column is constant");
  }

  DataMatrix out;
  out.values.resize(a.rows(), static_cast<Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    out.values.col(static_cast<Index>(c)) = a.values.col(kept[c]);
  }
  return {std::move(out), std::move(kept)};
}

}  // namespace tcor
