#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tcor/types.hpp"

namespace tcor {

/// Reads a comma-separated file of decimal numbers. An optional single header
/// row is skipped when has_header is set; quoting is not supported. With
/// transpose set, the file's rows become columns before interpretation.
/// Throws ParseError (with row/column location) on malformed cells or ragged
/// rows, ValidationError on non-finite values or matrices smaller than 2x2.
DataMatrix load_csv(const std::string& path, bool has_header = false,
                    bool transpose = false);

/// Reads exactly 8*m*n bytes of little-endian IEEE-754 doubles in
/// column-major order. Throws IoError on size mismatch, ValidationError on
/// non-finite entries.
DataMatrix load_binary(const std::string& path, Index m, Index n);

/// Writes the matrix in the load_binary format (round trips bit-exactly).
void save_binary(const DataMatrix& a, const std::string& path);

/// means[i] = (1/m) sum_r a[r,i]; centered_norms[i] is the Euclidean norm of
/// the mean-subtracted column, accumulated term by term so downstream exact
/// kernels see bit-identical sums. Throws ConstantColumnError listing every
/// column whose centered norm is at most 1e-12 times the largest column norm.
ColumnStats column_stats(const DataMatrix& a);

/// Removes columns flagged constant by the column_stats tolerance. Returns
/// the surviving matrix plus kept_indices mapping new column index to
/// original column index. Throws AllColumnsConstantError when nothing
/// survives.
std::pair<DataMatrix, std::vector<Index>> drop_constant_columns(
    const DataMatrix& a);

}  // namespace tcor
