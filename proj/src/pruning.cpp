#include "tcor/pruning.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

namespace tcor {
namespace {

// Counts surviving window starts in [begin, end) at the given gap.  Rows of
// proj are contiguous; the inner accumulation bails out as soon as the
// partial sum exceeds the bound, which kills most windows on the first
// (largest-variance) coordinate.
void scan_gap(const RowMatrix& proj, Index gap, double bound2, Index begin,
              Index end, std::vector<Index>& out) {
  const Index p = proj.cols();
  const double* base = proj.data();
  for (Index j = begin; j < end; ++j) {
    const double* a = base + j * p;
    const double* b = a + gap * p;
    double d2 = 0.0;
    for (Index c = 0; c < p; ++c) {
      const double diff = a[c] - b[c];
      d2 += diff * diff;
      if (d2 > bound2) break;
    }
    if (d2 <= bound2) out.push_back(j);
  }
}

struct GapTask {
  Index gap;
  Index begin;
  Index end;
};

// Fixed-size blocks keep the parallel schedule balanced when ell is small
// but n is large; the merge below runs in task order, so the output never
// depends on which thread finished first.
constexpr Index kScanBlock = 16384;

std::vector<GapTask> plan_tasks(Index n, Index ell) {
  std::vector<GapTask> tasks;
  for (Index gap = 1; gap <= ell; ++gap) {
    const Index starts = n - gap;
    for (Index b = 0; b < starts; b += kScanBlock) {
      tasks.push_back({gap, b, std::min<Index>(b + kScanBlock, starts)});
    }
  }
  return tasks;
}

CandidatePairs assemble(const PruningState& state,
                        const std::vector<GapTask>& tasks,
                        const std::vector<std::vector<Index>>& hits) {
  const Index n = static_cast<Index>(state.perm.size());
  CandidatePairs out;
  out.per_gap_counts.assign(static_cast<std::size_t>(state.ell), 0);
  std::size_t total = 0;
  for (const auto& h : hits) total += h.size();
  out.pairs.reserve(total);
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    const Index gap = tasks[ti].gap;
    out.per_gap_counts[static_cast<std::size_t>(gap - 1)] +=
        static_cast<std::int64_t>(hits[ti].size());
    for (const Index j : hits[ti]) {
      const Index u = state.perm[static_cast<std::size_t>(j)];
      const Index v = state.perm[static_cast<std::size_t>(j + gap)];
      out.pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
  }
  for (Index gap = 1; gap <= state.ell; ++gap) {
    out.tests_performed += static_cast<std::int64_t>(n - gap);
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  out.pairs.erase(std::unique(out.pairs.begin(), out.pairs.end()),
                  out.pairs.end());
  return out;
}

}  // namespace

std::vector<Index> order_permutation(const Vector& v1) {
  std::vector<Index> perm(static_cast<std::size_t>(v1.size()));
  std::iota(perm.begin(), perm.end(), Index{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&v1](Index a, Index b) { return v1[a] < v1[b]; });
  return perm;
}

Index longest_run(const Vector& sorted_v1, double radius) {
  const Index n = sorted_v1.size();
  Index ell = 0;
  Index lo = 0;
  for (Index hi = 1; hi < n; ++hi) {
    while (sorted_v1[hi] - sorted_v1[lo] > radius) ++lo;
    ell = std::max(ell, hi - lo);
  }
  return ell;
}

RowMatrix scaled_projection(const TruncatedSVD& svd,
                            const std::vector<Index>& perm) {
  const Index n = static_cast<Index>(perm.size());
  RowMatrix proj(n, svd.p);
  for (Index r = 0; r < n; ++r) {
    proj.row(r) =
        svd.V.row(perm[static_cast<std::size_t>(r)]).cwiseProduct(
            svd.s.transpose());
  }
  return proj;
}

PruningState make_pruning_state(const TruncatedSVD& svd, double dist2) {
  if (svd.p < 1) {
    throw ConfigError("pruning state requires at least one singular triplet");
  }
  PruningState state;
  state.perm = order_permutation(svd.V.col(0));
  state.proj = scaled_projection(svd, state.perm);
  state.radius = std::sqrt(dist2) / svd.s[0];
  Vector sorted_v1(svd.V.rows());
  for (Index r = 0; r < sorted_v1.size(); ++r) {
    sorted_v1[r] = svd.V(state.perm[static_cast<std::size_t>(r)], 0);
  }
  state.ell = longest_run(sorted_v1, state.radius);
  return state;
}

std::vector<Index> candidates_at_gap(const RowMatrix& proj, Index gap,
                                     double dist2, double slack) {
  assert(gap >= 1 && gap < proj.rows());
  std::vector<Index> out;
  scan_gap(proj, gap, dist2 + slack, 0, proj.rows() - gap, out);
  return out;
}

CandidatePairs generate_candidates(const PruningState& state, double dist2,
                                   double slack, int threads) {
  const double bound2 = dist2 + slack;
  const std::vector<GapTask> tasks =
      plan_tasks(static_cast<Index>(state.perm.size()), state.ell);
  std::vector<std::vector<Index>> hits(tasks.size());
  const auto count = static_cast<std::int64_t>(tasks.size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t ti = 0; ti < count; ++ti) {
    const GapTask& task = tasks[static_cast<std::size_t>(ti)];
    scan_gap(state.proj, task.gap, bound2, task.begin, task.end,
             hits[static_cast<std::size_t>(ti)]);
  }
  return assemble(state, tasks, hits);
}

CandidatePairs generate_candidates_serial(const PruningState& state,
                                          double dist2, double slack) {
  const double bound2 = dist2 + slack;
  const std::vector<GapTask> tasks =
      plan_tasks(static_cast<Index>(state.perm.size()), state.ell);
  std::vector<std::vector<Index>> hits(tasks.size());
  for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
    scan_gap(state.proj, tasks[ti].gap, bound2, tasks[ti].begin, tasks[ti].end,
             hits[ti]);
  }
  return assemble(state, tasks, hits);
}

std::int64_t estimate_adjacent_count(const RowMatrix& proj, double dist2,
                                     double slack) {
  if (proj.rows() < 2) return 0;
  std::vector<Index> out;
  scan_gap(proj, 1, dist2 + slack, 0, proj.rows() - 1, out);
  return static_cast<std::int64_t>(out.size());
}

}  // namespace tcor
