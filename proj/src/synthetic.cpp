#include "tcor/synthetic.hpp"

#include <cmath>
#include <vector>

#include "tcor/rng.hpp"

namespace tcor {

DataMatrix synthetic_factor_matrix(const SyntheticSpec& spec) {
  const Index m = spec.m;
  const Index n = spec.n;
  const Index nf = spec.factors;
  NormalSampler rng(spec.seed);

  // Shared unit-norm factors, weighted 1/k when mixed into columns.
  Matrix factors(m, nf);
  for (Index k = 0; k < nf; ++k) {
    for (Index r = 0; r < m; ++r) factors(r, k) = rng();
    factors.col(k).normalize();
  }
  Vector weights(nf);
  for (Index k = 0; k < nf; ++k) weights[k] = 1.0 / static_cast<double>(k + 1);

  // Block layout: block b starts at b * stride and has 3 + (b % 4) members.
  // block_member[j] < 0 marks a background column; 0 marks a block base.
  const Index stride = spec.blocks > 0 ? n / spec.blocks : n;
  std::vector<int> block_member(static_cast<std::size_t>(n), -1);
  std::vector<int> block_id(static_cast<std::size_t>(n), -1);
  for (Index b = 0; b < spec.blocks; ++b) {
    const Index size = 3 + (b % 4);
    const Index start = b * stride;
    if (start + size > n) break;
    for (Index c = 0; c < size; ++c) {
      block_member[static_cast<std::size_t>(start + c)] = static_cast<int>(c);
      block_id[static_cast<std::size_t>(start + c)] = static_cast<int>(b);
    }
  }

  DataMatrix a;
  a.values.resize(m, n);
  Vector gamma(nf);
  Vector base(m);
  double base_eps0 = 0.0;
  bool base_duplicates = false;

  auto draw_factor_column = [&](Index j) {
    for (Index k = 0; k < nf; ++k) gamma[k] = weights[k] * rng();
    a.values.col(j).noalias() = factors * gamma;
    for (Index r = 0; r < m; ++r) a.values(r, j) += spec.noise * rng();
  };

  for (Index j = 0; j < n; ++j) {
    const int member = block_member[static_cast<std::size_t>(j)];
    if (member < 0) {
      draw_factor_column(j);
      continue;
    }
    if (member == 0) {
      draw_factor_column(j);
      base = a.values.col(j);
      // Per-block member-noise amplitude: log-spaced so low blocks sit
      // almost entirely above a 0.99 threshold and high ones straddle or
      // miss it.  With |base| ~ O(1) and noise spread over m coordinates,
      // cor(base, base + eps*w) ~ 1 - eps^2 * m / (2 |base|^2).
      const int b = block_id[static_cast<std::size_t>(j)];
      const double frac =
          spec.blocks > 1 ? static_cast<double>(b) / (spec.blocks - 1) : 0.0;
      base_eps0 = 0.006 * std::pow(8.0, frac);  // 0.006 .. 0.048
      base_duplicates = (b % 7 == 0);
      continue;
    }
    double eps = base_eps0 * std::pow(1.6, member - 1);
    if (member == 1 && base_duplicates) eps = 0.0;  // exact duplicate pair
    for (Index r = 0; r < m; ++r) {
      a.values(r, j) = base[r] + eps * rng();
    }
  }
  return a;
}

}  // namespace tcor
