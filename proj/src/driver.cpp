#include "tcor/driver.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "tcor/io.hpp"
#include "tcor/linop.hpp"
#include "tcor/pruning.hpp"

namespace tcor {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int resolve_threads(int threads) {
  return threads > 0 ? threads : omp_get_max_threads();
}

void check_common(const DataMatrix& a, const TcorConfig& config) {
  if (a.rows() < 2 || a.cols() < 2) {
    std::ostringstream msg;
    msg << "matrix must be at least 2x2, got " << a.rows() << "x" << a.cols();
    throw ValidationError(msg.str());
  }
  if (config.p0 < 1) throw ConfigError("initial rank p0 must be >= 1");
  if (config.p_max < 0) throw ConfigError("rank cap p_max must be >= 0");
  if (!(config.growth > 1.0)) throw ConfigError("growth must exceed 1");
  if (config.improvement_floor < 0.0 || config.improvement_floor >= 1.0) {
    throw ConfigError("improvement floor must lie in [0, 1)");
  }
  if (config.slack < 0.0) throw ConfigError("slack must be >= 0");
}

Index resolve_cap(const CenteredScaledOperator& op, const TcorConfig& config) {
  const Index hard = op.max_rank();
  if (config.p_max > 0) return std::min(config.p_max, hard);
  return std::min<Index>(100, hard);
}

// Rank-adaptation rounds: grow p while the adjacent-gap survivor count stays
// over budget and each round still shrinks it meaningfully.  perm, radius
// and ell were fixed by the first factorization and are reused; only the
// projection is rebuilt at the higher rank.
void adapt_rank(const CenteredScaledOperator& op, TruncatedSVD& svd,
                PruningState& state, double dist2, const TcorConfig& config,
                Index p_cap, std::int64_t budget, int& rounds) {
  rounds = 1;
  if (state.ell < 1) return;
  std::int64_t estimate =
      estimate_adjacent_count(state.proj, dist2, config.slack);
  std::int64_t previous = -1;
  while (estimate > budget && svd.p < p_cap && !svd.rank_deficient) {
    if (previous >= 0) {
      const double shrink =
          static_cast<double>(previous - estimate) /
          static_cast<double>(previous);
      if (shrink <= config.improvement_floor) break;
    }
    Index p_next = static_cast<Index>(
        std::llround(config.growth * static_cast<double>(svd.p)));
    p_next = std::min(std::max(p_next, svd.p + 1), p_cap);
    svd = extend(svd, op, p_next, config.svd);
    state.proj = scaled_projection(svd, state.perm);
    previous = estimate;
    estimate = estimate_adjacent_count(state.proj, dist2, config.slack);
    ++rounds;
  }
}

void finish_diagnostics(Diagnostics& diag, const DataMatrix& a, Index p_final,
                        Index ell, int rounds, Clock::time_point start) {
  diag.m = a.rows();
  diag.n = a.cols();
  diag.p_final = p_final;
  diag.ell = ell;
  diag.rounds = rounds;
  diag.savings_estimate = savings_estimate(
      a.cols(), a.rows(), std::max<Index>(ell, 1), std::max<Index>(p_final, 1));
  const double total_pairs =
      0.5 * static_cast<double>(a.cols()) * static_cast<double>(a.cols() - 1);
  diag.evaluated_fraction =
      total_pairs > 0.0
          ? static_cast<double>(diag.evaluated_count) / total_pairs
          : 0.0;
  diag.wall_seconds = seconds_since(start);
}

CandidatePairs all_pairs(Index n) {
  CandidatePairs cand;
  cand.pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) cand.pairs.emplace_back(i, j);
  }
  cand.per_gap_counts.assign(static_cast<std::size_t>(n - 1), 0);
  for (Index gap = 1; gap < n; ++gap) {
    cand.per_gap_counts[static_cast<std::size_t>(gap - 1)] = n - gap;
    cand.tests_performed += n - gap;
  }
  return cand;
}

}  // namespace

ThresholdedResult tcor(const DataMatrix& a, const TcorConfig& config) {
  const auto start = Clock::now();
  check_common(a, config);
  if (!(config.t > 0.0 && config.t < 1.0)) {
    throw ConfigError("correlation threshold must lie strictly in (0, 1)");
  }
  const ColumnStats stats = column_stats(a);
  const auto op = CenteredScaledOperator::standardized(a, stats);
  const Index p_cap = resolve_cap(op, config);
  const int threads = resolve_threads(config.threads);
  const std::int64_t budget = config.candidate_budget >= 0
                                  ? config.candidate_budget
                                  : 10 * static_cast<std::int64_t>(a.cols());
  const double dist2 = 2.0 * (1.0 - config.t);

  TruncatedSVD svd = truncated_svd(op, std::min(config.p0, p_cap), config.svd);
  PruningState state = make_pruning_state(svd, dist2);
  int rounds = 0;
  adapt_rank(op, svd, state, dist2, config, p_cap, budget, rounds);

  const CandidatePairs cand =
      generate_candidates(state, dist2, config.slack, threads);
  ThresholdedResult res = filter_candidates(a, stats, cand, config.t, threads);
  finish_diagnostics(res.diagnostics, a, svd.p, state.ell, rounds, start);
  return res;
}

ThresholdedResult tdist(const DataMatrix& a, double d,
                        const TcorConfig& config) {
  const auto start = Clock::now();
  check_common(a, config);
  if (!(d > 0.0)) {
    throw ConfigError("distance threshold must be positive");
  }
  const auto op = CenteredScaledOperator::raw(a);
  const Index p_cap = resolve_cap(op, config);
  const int threads = resolve_threads(config.threads);
  const std::int64_t budget = config.candidate_budget >= 0
                                  ? config.candidate_budget
                                  : 10 * static_cast<std::int64_t>(a.cols());
  const double dist2 = d * d;

  TruncatedSVD svd = truncated_svd(op, std::min(config.p0, p_cap), config.svd);
  ThresholdedResult res;
  Index ell = 0;
  int rounds = 0;
  if (svd.p == 0) {
    // Identically zero matrix: every projected distance is zero, so nothing
    // can be pruned; fall back to evaluating all pairs exactly.
    ell = a.cols() - 1;
    rounds = 1;
    res = filter_distances(a, all_pairs(a.cols()), d, threads);
  } else {
    PruningState state = make_pruning_state(svd, dist2);
    adapt_rank(op, svd, state, dist2, config, p_cap, budget, rounds);
    const CandidatePairs cand =
        generate_candidates(state, dist2, config.slack, threads);
    res = filter_distances(a, cand, d, threads);
    ell = state.ell;
  }
  finish_diagnostics(res.diagnostics, a, svd.p, ell, rounds, start);
  return res;
}

double savings_estimate(Index n, Index m, Index ell, Index p) {
  return static_cast<double>(n) * static_cast<double>(m) /
         (static_cast<double>(ell) * static_cast<double>(p));
}

ThresholdedResult brute_force_threshold(const DataMatrix& a, double threshold,
                                        ThresholdMode mode, int threads,
                                        Index guard) {
  const auto start = Clock::now();
  const Index n = a.cols();
  if (n > guard) {
    std::ostringstream msg;
    msg << "brute force over " << n
        << " columns exceeds the size guard of " << guard
        << "; pass a larger guard to run it anyway";
    throw ConfigError(msg.str());
  }
  const int nthreads = resolve_threads(threads);

  // Correlation mode screens with a tiled Gram product of the standardized
  // columns: each Gram entry is the correlation up to a few ulps, far inside
  // any tolerance the results are consumed at, and the matrix product keeps
  // the quadratic pass affordable at large n. Distance mode cannot take that
  // shortcut -- ||x||^2 + ||y||^2 - 2x.y cancels catastrophically for nearly
  // identical columns -- so it walks every pair through the same exact kernel
  // the pruned path uses and the reference values match it bit for bit.
  Matrix z;
  if (mode == ThresholdMode::Correlation) {
    const ColumnStats stats = column_stats(a);
    z = CenteredScaledOperator::standardized(a, stats).materialize();
  }

  constexpr Index kTile = 2048;
  const Index tiles = (n + kTile - 1) / kTile;
  std::vector<std::pair<Index, Index>> tile_pairs;
  for (Index bi = 0; bi < tiles; ++bi) {
    for (Index bj = bi; bj < tiles; ++bj) tile_pairs.emplace_back(bi, bj);
  }
  std::vector<std::vector<ResultEntry>> parts(tile_pairs.size());
  const auto count = static_cast<std::int64_t>(tile_pairs.size());
#pragma omp parallel for schedule(dynamic) num_threads(nthreads)
  for (std::int64_t tp = 0; tp < count; ++tp) {
    const auto [bi, bj] = tile_pairs[static_cast<std::size_t>(tp)];
    const Index i0 = bi * kTile, i1 = std::min(i0 + kTile, n);
    const Index j0 = bj * kTile, j1 = std::min(j0 + kTile, n);
    auto& out = parts[static_cast<std::size_t>(tp)];
    if (mode == ThresholdMode::Correlation) {
      const Matrix gram =
          z.middleCols(i0, i1 - i0).transpose() * z.middleCols(j0, j1 - j0);
      for (Index i = i0; i < i1; ++i) {
        for (Index j = std::max(j0, i + 1); j < j1; ++j) {
          const double v = std::clamp(gram(i - i0, j - j0), -1.0, 1.0);
          if (v >= threshold) out.push_back({i, j, v});
        }
      }
    } else {
      for (Index i = i0; i < i1; ++i) {
        for (Index j = std::max(j0, i + 1); j < j1; ++j) {
          const double v = exact_distance(a, i, j);
          if (v <= threshold) out.push_back({i, j, v});
        }
      }
    }
  }

  ThresholdedResult res;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  res.entries.reserve(total);
  for (const auto& part : parts) {
    res.entries.insert(res.entries.end(), part.begin(), part.end());
  }
  std::sort(res.entries.begin(), res.entries.end(),
            [](const ResultEntry& x, const ResultEntry& y) {
              return x.i != y.i ? x.i < y.i : x.j < y.j;
            });
  res.diagnostics.m = a.rows();
  res.diagnostics.n = n;
  res.diagnostics.candidate_count = static_cast<std::int64_t>(n) * (n - 1) / 2;
  res.diagnostics.evaluated_count = res.diagnostics.candidate_count;
  res.diagnostics.result_count = static_cast<std::int64_t>(res.entries.size());
  res.diagnostics.evaluated_fraction = 1.0;
  res.diagnostics.wall_seconds = seconds_since(start);
  return res;
}

}  // namespace tcor
