#pragma once

#include "tcor/types.hpp"

namespace tcor {

/// Linear operator B = (A - e z^T) W applied without forming it, where z is
/// the vector of column means, W = diag(1 / centered_norms) and e is all
/// ones. Every column of B has zero mean and unit norm, so B^T B is the
/// Pearson correlation matrix of A. A raw (uncentered, unscaled) variant is
/// provided for the thresholded-distance mode, where B = A.
///
/// A matrix-vector product costs one product with A plus O(m + n) extra work;
/// the standardized matrix is never materialized except by materialize().
class CenteredScaledOperator {
 public:
  /// Operator for the standardized matrix of `a`. Both references must
  /// outlive the operator.
  static CenteredScaledOperator standardized(const DataMatrix& a,
                                             const ColumnStats& stats);

  /// Operator for `a` itself (distance mode).
  static CenteredScaledOperator raw(const DataMatrix& a);

  Index rows() const { return a_->rows(); }
  Index cols() const { return a_->cols(); }
  bool centered() const { return centered_; }

  /// Largest rank the operator can have: centering removes one dimension
  /// from the column space.
  Index max_rank() const {
    return std::min(rows() - (centered_ ? 1 : 0), cols());
  }

  /// B x = A(Wx) - e (z^T W x). Throws ValidationError on length mismatch.
  Vector apply(const Vector& x) const;

  /// B^T y = W(A^T y) - W z (e^T y).
  Vector apply_transpose(const Vector& y) const;

  /// Dense m x n copy of B, used by the small-problem SVD path and tests.
  Matrix materialize() const;

 private:
  CenteredScaledOperator(const DataMatrix& a, Vector means, Vector inv_norms,
                         bool centered)
      : a_(&a),
        means_(std::move(means)),
        inv_norms_(std::move(inv_norms)),
        centered_(centered) {}

  const DataMatrix* a_;
  Vector means_;
  Vector inv_norms_;
  bool centered_;
};

}  // namespace tcor
