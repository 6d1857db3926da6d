#pragma once

#include <cstdint>

#include "tcor/svd.hpp"
#include "tcor/threshold.hpp"
#include "tcor/types.hpp"

namespace tcor {

struct TcorConfig {
  double t = 0.0;          ///< correlation threshold, strictly inside (0, 1)
  Index p0 = 10;           ///< initial truncation rank
  Index p_max = 0;         ///< rank cap; 0 -> min(100, m-1, n)
  double growth = 2.0;     ///< rank multiplier per adaptation round
  std::int64_t candidate_budget = -1;  ///< adjacent-count budget; <0 -> 10*n
  double improvement_floor = 0.10;     ///< min relative shrink to keep going
  double slack = 1e-8;     ///< additive slack in the candidate test
  int threads = 0;         ///< worker threads; 0 -> OpenMP default
  SvdOptions svd;
};

/// All column pairs of `a` with Pearson correlation >= config.t, exactly.
///
/// Runs the truncated-SVD pruning pipeline: standardize implicitly, take a
/// rank-p0 SVD, order columns by the leading right singular vector, scan
/// position gaps up to the run length for pairs whose projected distance
/// can still beat the threshold, then evaluate those exactly.  While the
/// adjacent-gap survivor count exceeds `candidate_budget` and keeps
/// dropping by more than `improvement_floor` per round, the rank is grown
/// by `growth` (capped at p_max) to sharpen the pruning bound.
///
/// `a` must have no constant columns (see drop_constant_columns).
ThresholdedResult tcor(const DataMatrix& a, const TcorConfig& config);

/// All column pairs of `a` at Euclidean distance <= d, exactly.  Works on
/// raw columns — no centering or scaling, so constant columns are fine.
ThresholdedResult tdist(const DataMatrix& a, double d,
                        const TcorConfig& config);

/// Expected work ratio of brute force over pruning, n*m / (ell * p).
double savings_estimate(Index n, Index m, Index ell, Index p);

enum class ThresholdMode { Correlation, Distance };

/// Reference answer by materializing the full pairwise comparison via tiled
/// Gram products.  Guarded against accidental huge inputs; raise `guard`
/// deliberately to run bigger instances.
ThresholdedResult brute_force_threshold(const DataMatrix& a, double threshold,
                                        ThresholdMode mode, int threads = 0,
                                        Index guard = 20000);

}  // namespace tcor
