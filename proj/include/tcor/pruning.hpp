#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tcor/svd.hpp"
#include "tcor/types.hpp"

namespace tcor {

/// Ordering and projection data shared by the candidate scans.
///
/// `perm` sorts columns by their first right-singular-vector coordinate;
/// `proj` holds the permuted, singular-value-scaled coordinates row per
/// column, so squared row differences lower-bound squared distances between
/// standardized columns.  `radius` is the window on the first coordinate a
/// qualifying pair must fit in, and `ell` the largest position gap between
/// sorted first coordinates within that window — pairs further apart than
/// `ell` positions cannot qualify.
struct PruningState {
  std::vector<Index> perm;  ///< position -> original column index
  RowMatrix proj;           ///< n x p, row r = V.row(perm[r]) scaled by s
  double radius = 0.0;
  Index ell = 0;
};

/// Indices 0..n-1 sorted ascending by v1, ties in original-index order.
std::vector<Index> order_permutation(const Vector& v1);

/// Largest g such that sorted_v1[j+g] - sorted_v1[j] <= radius for some j;
/// 0 when no two entries are within radius of each other.
Index longest_run(const Vector& sorted_v1, double radius);

/// proj(r, c) = svd.V(perm[r], c) * svd.s[c], row-major.
RowMatrix scaled_projection(const TruncatedSVD& svd,
                            const std::vector<Index>& perm);

/// Builds the full state for a squared-distance bound `dist2` (2(1-t) in
/// correlation mode, d^2 in distance mode).  Requires svd.p >= 1.
PruningState make_pruning_state(const TruncatedSVD& svd, double dist2);

struct CandidatePairs {
  /// Original column index pairs, i < j, sorted lexicographically, unique.
  std::vector<std::pair<Index, Index>> pairs;
  /// per_gap_counts[g-1] = number of surviving windows at position gap g.
  std::vector<std::int64_t> per_gap_counts;
  /// Total window tests performed (sum over scanned gaps of n - gap).
  std::int64_t tests_performed = 0;
};

/// Window starts j with ||proj.row(j+gap) - proj.row(j)||^2 <= dist2 + slack.
/// Requires 1 <= gap <= n-1.
std::vector<Index> candidates_at_gap(const RowMatrix& proj, Index gap,
                                     double dist2, double slack);

/// Union of candidates_at_gap over gap = 1..ell, mapped back to original
/// column indices.  The serial variant is the reference implementation the
/// OpenMP one is checked against; both produce identical output.
CandidatePairs generate_candidates(const PruningState& state, double dist2,
                                   double slack, int threads);
CandidatePairs generate_candidates_serial(const PruningState& state,
                                          double dist2, double slack);

/// |candidates_at_gap(proj, 1, ...)| — the cheap proxy the rank-adaptation
/// loop watches.
std::int64_t estimate_adjacent_count(const RowMatrix& proj, double dist2,
                                     double slack);

}  // namespace tcor
