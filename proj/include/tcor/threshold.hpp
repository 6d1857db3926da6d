#pragma once

#include <cstdint>
#include <vector>

#include "tcor/pruning.hpp"
#include "tcor/types.hpp"

namespace tcor {

/// One reported pair; 0-based column indices with i < j.  `value` is a
/// correlation in [-1, 1] or a Euclidean distance depending on the mode.
struct ResultEntry {
  Index i = 0;
  Index j = 0;
  double value = 0.0;
};

struct Diagnostics {
  Index m = 0;
  Index n = 0;
  Index p_final = 0;
  Index ell = 0;
  std::int64_t candidate_count = 0;
  std::int64_t evaluated_count = 0;
  std::int64_t step4_tests = 0;
  std::int64_t result_count = 0;
  double savings_estimate = 0.0;
  double evaluated_fraction = 0.0;
  int rounds = 0;
  double wall_seconds = 0.0;
};

struct ThresholdedResult {
  std::vector<ResultEntry> entries;  ///< sorted by (i, j), unique, i < j
  Diagnostics diagnostics;
};

/// Pearson correlation of columns i and j, computed from the original data
/// (centered on the fly, never from truncated factors) and clamped to
/// [-1, 1].  Requires distinct in-range indices.
double exact_correlation(const DataMatrix& a, const ColumnStats& stats,
                         Index i, Index j);

/// Euclidean distance between raw columns i and j.
double exact_distance(const DataMatrix& a, Index i, Index j);

/// Evaluates every candidate pair exactly and keeps values >= t (inclusive,
/// no epsilon — the slack lives in the pruning stage only).  Candidates
/// arrive sorted by (i, j); the output preserves that order, and the
/// parallel variant chunks the list so its output is byte-identical to the
/// serial reference regardless of thread count.
ThresholdedResult filter_candidates(const DataMatrix& a,
                                    const ColumnStats& stats,
                                    const CandidatePairs& cand, double t,
                                    int threads);
ThresholdedResult filter_candidates_serial(const DataMatrix& a,
                                           const ColumnStats& stats,
                                           const CandidatePairs& cand,
                                           double t);

/// Distance-mode twin: keeps exact distances <= d.
ThresholdedResult filter_distances(const DataMatrix& a,
                                   const CandidatePairs& cand, double d,
                                   int threads);
ThresholdedResult filter_distances_serial(const DataMatrix& a,
                                          const CandidatePairs& cand,
                                          double d);

}  // namespace tcor
