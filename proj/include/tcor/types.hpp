#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tcor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Row-major storage keeps each point's coordinates contiguous, which the
// pairwise scan kernels rely on.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense matrix of m observations (rows) by n variables (columns).
/// Valid instances have m >= 2, n >= 2 and only finite entries; the loaders
/// in io.hpp enforce this. Storage is column-major so per-variable access is
/// contiguous.
struct DataMatrix {
  Matrix values;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

/// Per-column means and centered norms. centered_norms[i] is the Euclidean
/// norm of column i after subtracting its mean, so dividing a centered column
/// by it yields a unit-norm vector.
struct ColumnStats {
  Vector means;
  Vector centered_norms;
};

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// File could not be opened/read or has the wrong size.
struct IoError : Error {
  using Error::Error;
};

/// Malformed file contents (bad cell, ragged row).
struct ParseError : Error {
  using Error::Error;
};

/// Structurally invalid data: non-finite entries, dimensions below 2x2,
/// mismatched vector lengths.
struct ValidationError : Error {
  using Error::Error;
};

/// One or more columns have (numerically) zero variance.
struct ConstantColumnError : Error {
  std::vector<Index> columns;
  ConstantColumnError(const std::string& msg, std::vector<Index> cols)
      : Error(msg), columns(std::move(cols)) {}
};

/// Every column is constant; nothing is left to correlate.
struct AllColumnsConstantError : Error {
  using Error::Error;
};

/// Iterative SVD failed to reach the requested tolerance.
struct ConvergenceError : Error {
  double best_residual;
  ConvergenceError(const std::string& msg, double residual)
      : Error(msg), best_residual(residual) {}
};

/// Invalid configuration value or out-of-range argument.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace tcor
