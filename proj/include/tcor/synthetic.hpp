#pragma once

#include <cstdint>

#include "tcor/types.hpp"

namespace tcor {

/// Parameters for the deterministic factor-model test instance.
///
/// Columns follow x_j = sum_k (1/k) * gamma_jk * f_k + noise * g_j over
/// `factors` shared unit factors, so the leading singular values decay like
/// 1/k down to an isotropic noise floor, and the leading right singular
/// vector (driven by the k=1 loadings) is spread out enough for the
/// ordering step to bite.  On top of that, `blocks` groups of 3-6 columns
/// share a common base vector plus noise at a per-member amplitude ladder,
/// planting pairs on both sides of (and at) correlation thresholds like
/// 0.99, including exact duplicates.  Background pairs cannot reach such
/// thresholds: the isotropic noise share caps their correlation well below.
struct SyntheticSpec {
  Index m = 80;
  Index n = 50000;
  Index blocks = 40;
  Index factors = 16;
  double noise = 0.09;  // per-coordinate; noise power ~ noise^2 * m
  std::uint64_t seed = 0x5eed2026;
};

/// Generates the instance; same spec, same bytes, every time.
DataMatrix synthetic_factor_matrix(const SyntheticSpec& spec);

}  // namespace tcor
