#include "tcor/linop.hpp"

#include <sstream>

namespace tcor {

namespace {

void check_length(Index got, Index want, const char* what) {
  if (got != want) {
    std::ostringstream os;
    os << what << " has length " << got << ", expected " << want;
    throw ValidationError(os.str());
  }
}

}  // namespace

CenteredScaledOperator CenteredScaledOperator::standardized(
    const DataMatrix& a, const ColumnStats& stats) {
  check_length(stats.means.size(), a.cols(), "means");
  check_length(stats.centered_norms.size(), a.cols(), "centered_norms");
  if ((stats.centered_norms.array() <= 0.0).any()) {
    throw ValidationError("centered norms must be positive");
  }
  return CenteredScaledOperator(a, stats.means,
                                stats.centered_norms.cwiseInverse(), true);
}

CenteredScaledOperator CenteredScaledOperator::raw(const DataMatrix& a) {
  return CenteredScaledOperator(a, Vector::Zero(a.cols()),
                                Vector::Ones(a.cols()), false);
}

Vector CenteredScaledOperator::apply(const Vector& x) const {
  check_length(x.size(), cols(), "x");
  Vector xs = x.cwiseProduct(inv_norms_);
  Vector y = a_->values * xs;
  if (centered_) y.array() -= means_.dot(xs);
  return y;
}

Vector CenteredScaledOperator::apply_transpose(const Vector& y) const {
  check_length(y.size(), rows(), "y");
  Vector g = a_->values.transpose() * y;
  if (centered_) g.noalias() -= means_ * y.sum();
  return g.cwiseProduct(inv_norms_);
}

Matrix CenteredScaledOperator::materialize() const {
  Matrix b = a_->values * inv_norms_.asDiagonal();
  if (centered_) {
    b.rowwise() -= means_.cwiseProduct(inv_norms_).transpose();
  }
  return b;
}

}  // namespace tcor
