#include "tcor/threshold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tcor {
namespace {

constexpr std::size_t kChunk = 4096;  // pairs per parallel task

void check_pair(const DataMatrix& a, Index i, Index j) {
  if (i < 0 || j < 0 || i >= a.cols() || j >= a.cols() || i == j) {
    std::ostringstream msg;
    msg << "invalid column pair (" << i << ", " << j << ") for " << a.cols()
        << " columns";
    throw ValidationError(msg.str());
  }
}

// Shared chunked filter.  Eval must be pure; chunks are merged in index
// order so the result is independent of the parallel schedule.
template <typename Eval>
std::vector<ResultEntry> filter_chunked(
    const std::vector<std::pair<Index, Index>>& pairs, Eval eval,
    int threads) {
  const std::size_t chunks = (pairs.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<ResultEntry>> parts(chunks);
  const auto count = static_cast<std::int64_t>(chunks);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::int64_t c = 0; c < count; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t end = std::min(begin + kChunk, pairs.size());
    auto& out = parts[static_cast<std::size_t>(c)];
    for (std::size_t k = begin; k < end; ++k) {
      ResultEntry entry;
      if (eval(pairs[k].first, pairs[k].second, entry.value)) {
        entry.i = pairs[k].first;
        entry.j = pairs[k].second;
        out.push_back(entry);
      }
    }
  }
  std::vector<ResultEntry> entries;
  std::size_t total = 0;
  for (const auto& part : parts) total += part.size();
  entries.reserve(total);
  for (const auto& part : parts) {
    entries.insert(entries.end(), part.begin(), part.end());
  }
  return entries;
}

template <typename Eval>
std::vector<ResultEntry> filter_serial(
    const std::vector<std::pair<Index, Index>>& pairs, Eval eval) {
  std::vector<ResultEntry> entries;
  for (const auto& [i, j] : pairs) {
    ResultEntry entry;
    if (eval(i, j, entry.value)) {
      entry.i = i;
      entry.j = j;
      entries.push_back(entry);
    }
  }
  return entries;
}

ThresholdedResult wrap(std::vector<ResultEntry> entries,
                       const CandidatePairs& cand) {
  ThresholdedResult res;
  res.entries = std::move(entries);
  res.diagnostics.candidate_count =
      static_cast<std::int64_t>(cand.pairs.size());
  res.diagnostics.evaluated_count =
      static_cast<std::int64_t>(cand.pairs.size());
  res.diagnostics.step4_tests = cand.tests_performed;
  res.diagnostics.result_count =
      static_cast<std::int64_t>(res.entries.size());
  return res;
}

}  // namespace

double exact_correlation(const DataMatrix& a, const ColumnStats& stats,
                         Index i, Index j) {
  check_pair(a, i, j);
  const Index m = a.rows();
  const double zi = stats.means[i];
  const double zj = stats.means[j];
  const double* ci = a.values.col(i).data();
  const double* cj = a.values.col(j).data();
  // One fused pass for the centered dot and both squared norms.  Running
  // all three through the same accumulation order makes identical columns
  // come out at exactly 1 (and sign-flipped ones at exactly -1): the three
  // sums are then bit-equal, and sqrt(x*x) == x in round-to-nearest.
  double dot = 0.0, sqi = 0.0, sqj = 0.0;
  for (Index r = 0; r < m; ++r) {
    const double di = ci[r] - zi;
    const double dj = cj[r] - zj;
    dot += di * dj;
    sqi += di * di;
    sqj += dj * dj;
  }
  const double v = dot / std::sqrt(sqi * sqj);
  return std::clamp(v, -1.0, 1.0);
}

double exact_distance(const DataMatrix& a, Index i, Index j) {
  check_pair(a, i, j);
  const Index m = a.rows();
  const double* ci = a.values.col(i).data();
  const double* cj = a.values.col(j).data();
  double acc = 0.0;
  for (Index r = 0; r < m; ++r) {
    const double diff = ci[r] - cj[r];
    acc += diff * diff;
  }
  return std::sqrt(acc);
}

ThresholdedResult filter_candidates(const DataMatrix& a,
                                    const ColumnStats& stats,
                                    const CandidatePairs& cand, double t,
                                    int threads) {
  auto eval = [&](Index i, Index j, double& value) {
    value = exact_correlation(a, stats, i, j);
    return value >= t;
  };
  return wrap(filter_chunked(cand.pairs, eval, threads), cand);
}

ThresholdedResult filter_candidates_serial(const DataMatrix& a,
                                           const ColumnStats& stats,
                                           const CandidatePairs& cand,
                                           double t) {
  auto eval = [&](Index i, Index j, double& value) {
    value = exact_correlation(a, stats, i, j);
    return value >= t;
  };
  return wrap(filter_serial(cand.pairs, eval), cand);
}

ThresholdedResult filter_distances(const DataMatrix& a,
                                   const CandidatePairs& cand, double d,
                                   int threads) {
  auto eval = [&](Index i, Index j, double& value) {
    value = exact_distance(a, i, j);
    return value <= d;
  };
  return wrap(filter_chunked(cand.pairs, eval, threads), cand);
}

ThresholdedResult filter_distances_serial(const DataMatrix& a,
                                          const CandidatePairs& cand,
                                          double d) {
  auto eval = [&](Index i, Index j, double& value) {
    value = exact_distance(a, i, j);
    return value <= d;
  };
  return wrap(filter_serial(cand.pairs, eval), cand);
}

}  // namespace tcor
