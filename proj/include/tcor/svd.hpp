#pragma once

#include <cstdint>

#include "tcor/linop.hpp"
#include "tcor/types.hpp"

namespace tcor {

/// Leading singular triplets of a linear operator, singular values in
/// nonincreasing order.  Only strictly positive (above-cutoff) values are
/// kept, so `p` can come back smaller than requested; `rank_deficient` is
/// set when that happens.
struct TruncatedSVD {
  Index p = 0;                  ///< number of retained triplets
  Vector s;                     ///< singular values, s[0] >= ... >= s[p-1] > 0
  Matrix V;                     ///< right singular vectors, cols x p
  Matrix U;                     ///< left singular vectors, rows x p
  bool rank_deficient = false;  ///< requested rank exceeded numerical rank
};

enum class SvdMethod {
  Auto,     ///< Dense when min(rows, cols) <= 200, Lanczos otherwise
  Lanczos,  ///< restarted Lanczos bidiagonalization on the implicit operator
  Dense,    ///< full SVD of the materialized matrix
};

struct SvdOptions {
  double tol = 1e-8;              ///< residual tolerance relative to sigma_1
  int max_restarts = 1000;
  SvdMethod method = SvdMethod::Auto;
  std::uint64_t seed = 0x746372;  ///< start-vector seed
  double rank_cutoff = 1e-12;     ///< drop sigma_i <= cutoff * sigma_1
};

/// Computes the top-p singular triplets of `op` without forming the matrix
/// (unless the dense path is selected).  Requires 1 <= p <= op.max_rank().
/// Throws ConvergenceError if the iteration does not reach `tol` within
/// `max_restarts` restarts, and ConfigError on a bad `p`.
TruncatedSVD truncated_svd(const CenteredScaledOperator& op, Index p,
                           const SvdOptions& options = {});

/// Recomputes a decomposition at a higher rank, reusing `svd`'s leading right
/// singular vector to warm-start the iteration.  Requires
/// svd.p < p_new <= op.max_rank().
TruncatedSVD extend(const TruncatedSVD& svd, const CenteredScaledOperator& op,
                    Index p_new, const SvdOptions& options = {});

}  // namespace tcor
