#pragma once

// Shared helpers for the test binaries.  The oracles here are written
// independently of the library internals on purpose: plain two-pass
// formulas and O(n^2) scans, so library bugs cannot cancel out.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "tcor/rng.hpp"
#include "tcor/threshold.hpp"
#include "tcor/types.hpp"

namespace testutil {

inline tcor::DataMatrix random_matrix(tcor::Index m, tcor::Index n,
                                      std::uint64_t seed) {
  tcor::NormalSampler rng(seed);
  tcor::DataMatrix a;
  a.values.resize(m, n);
  for (tcor::Index j = 0; j < n; ++j) {
    for (tcor::Index r = 0; r < m; ++r) a.values(r, j) = rng();
  }
  return a;
}

// Overwrites `count` random column pairs so the matrix contains exact
// duplicates and near-duplicates, the hard cases for threshold boundaries.
inline void plant_duplicates(tcor::DataMatrix& a, std::uint64_t seed,
                             int count) {
  tcor::NormalSampler rng(seed);
  const tcor::Index n = a.cols();
  const tcor::Index m = a.rows();
  for (int k = 0; k < count; ++k) {
    const auto i = static_cast<tcor::Index>(rng.uniform() * n) % n;
    auto j = static_cast<tcor::Index>(rng.uniform() * n) % n;
    if (i == j) j = (j + 1) % n;
    a.values.col(j) = a.values.col(i);
    if (k % 2 == 0) {  // near-duplicate: small perturbation
      const double eps = 0.002 * (1 + k);
      for (tcor::Index r = 0; r < m; ++r) {
        a.values(r, j) += eps * rng();
      }
    }
  }
}

// Plain two-pass Pearson correlation, the textbook way.
inline double pearson_oracle(const tcor::DataMatrix& a, tcor::Index i,
                             tcor::Index j) {
  const tcor::Index m = a.rows();
  double zi = 0.0, zj = 0.0;
  for (tcor::Index r = 0; r < m; ++r) {
    zi += a.values(r, i);
    zj += a.values(r, j);
  }
  zi /= static_cast<double>(m);
  zj /= static_cast<double>(m);
  double dot = 0.0, sqi = 0.0, sqj = 0.0;
  for (tcor::Index r = 0; r < m; ++r) {
    const double di = a.values(r, i) - zi;
    const double dj = a.values(r, j) - zj;
    dot += di * dj;
    sqi += di * di;
    sqj += dj * dj;
  }
  return dot / (std::sqrt(sqi) * std::sqrt(sqj));
}

inline double distance_oracle(const tcor::DataMatrix& a, tcor::Index i,
                              tcor::Index j) {
  double acc = 0.0;
  for (tcor::Index r = 0; r < a.rows(); ++r) {
    const double d = a.values(r, i) - a.values(r, j);
    acc += d * d;
  }
  return std::sqrt(acc);
}

using PairSet = std::set<std::pair<tcor::Index, tcor::Index>>;

// All pairs with oracle correlation >= t (inclusive), by exhaustive scan.
inline PairSet true_cor_pairs(const tcor::DataMatrix& a, double t) {
  PairSet out;
  for (tcor::Index i = 0; i < a.cols(); ++i) {
    for (tcor::Index j = i + 1; j < a.cols(); ++j) {
      if (pearson_oracle(a, i, j) >= t) out.insert({i, j});
    }
  }
  return out;
}

inline PairSet true_dist_pairs(const tcor::DataMatrix& a, double d) {
  PairSet out;
  for (tcor::Index i = 0; i < a.cols(); ++i) {
    for (tcor::Index j = i + 1; j < a.cols(); ++j) {
      if (distance_oracle(a, i, j) <= d) out.insert({i, j});
    }
  }
  return out;
}

inline PairSet entry_pairs(const std::vector<tcor::ResultEntry>& entries) {
  PairSet out;
  for (const auto& e : entries) out.insert({e.i, e.j});
  return out;
}

inline PairSet candidate_set(
    const std::vector<std::pair<tcor::Index, tcor::Index>>& pairs) {
  return PairSet(pairs.begin(), pairs.end());
}

// Standardized columns by the definition (two-pass mean, centered norm),
// independent of CenteredScaledOperator::materialize.
inline tcor::Matrix standardize_oracle(const tcor::DataMatrix& a) {
  const tcor::Index m = a.rows();
  const tcor::Index n = a.cols();
  tcor::Matrix z(m, n);
  for (tcor::Index j = 0; j < n; ++j) {
    double mean = 0.0;
    for (tcor::Index r = 0; r < m; ++r) mean += a.values(r, j);
    mean /= static_cast<double>(m);
    double cn2 = 0.0;
    for (tcor::Index r = 0; r < m; ++r) {
      const double c = a.values(r, j) - mean;
      cn2 += c * c;
    }
    const double cn = std::sqrt(cn2);
    for (tcor::Index r = 0; r < m; ++r) {
      z(r, j) = (a.values(r, j) - mean) / cn;
    }
  }
  return z;
}

}  // namespace testutil
