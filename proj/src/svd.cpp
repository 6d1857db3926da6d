#include "tcor/svd.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tcor/rng.hpp"

namespace tcor {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Two rounds of classical Gram-Schmidt against the leading `cols` columns of
// `basis`.  Two passes are enough to restore orthogonality to machine
// precision ("twice is enough"), and each pass is two GEMVs, so this stays
// cheap relative to the operator products.
void orthogonalize(const Matrix& basis, Index cols, Vector& x) {
  if (cols == 0) return;
  const auto b = basis.leftCols(cols);
  x.noalias() -= b * (b.transpose() * x).eval();
  x.noalias() -= b * (b.transpose() * x).eval();
}

Vector random_direction(NormalSampler& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng();
  return v;
}

// Fresh unit vector orthogonal to the leading `cols` columns of `basis`.
// Returns false if no such direction could be found (basis already spans).
bool random_orthonormal(NormalSampler& rng, const Matrix& basis, Index cols,
                        Vector& out) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    out = random_direction(rng, basis.rows());
    const double raw = out.norm();
    if (raw == 0.0) continue;
    out /= raw;
    orthogonalize(basis, cols, out);
    const double left = out.norm();
    // A random unit vector keeps most of its mass outside a proper subspace,
    // so anything tiny here means we were unlucky; retry.
    if (left > 1e-3) {
      out /= left;
      return true;
    }
  }
  return false;
}

struct SmallSvd {
  Matrix P;   // left vectors of the projected matrix
  Matrix Q;   // right vectors
  Vector sv;  // singular values, nonincreasing
};

SmallSvd project_svd(const Matrix& b, Index j) {
  Eigen::JacobiSVD<Matrix> svd(b.topLeftCorner(j, j),
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

TruncatedSVD extract(const Matrix& u_basis, const Matrix& v_basis, Index j,
                     const SmallSvd& small, Index p, double rank_cutoff) {
  const double cutoff =
      small.sv.size() > 0 ? rank_cutoff * small.sv[0] : 0.0;
  Index kept = 0;
  while (kept < p && kept < small.sv.size() && small.sv[kept] > cutoff) {
    ++kept;
  }
  TruncatedSVD out;
  out.p = kept;
  out.s = small.sv.head(kept);
  out.U.noalias() = u_basis.leftCols(j) * small.P.leftCols(kept);
  out.V.noalias() = v_basis.leftCols(j) * small.Q.leftCols(kept);
  out.rank_deficient = kept < p;
  return out;
}

// Restarted Lanczos bidiagonalization with full reorthogonalization.
//
// State after j expansions: orthonormal bases U (rows x j) and V (cols x j),
// an upper-triangular projection B (j x j) with  op * V = U * B, and a
// residual f orthogonal to V with  op' * U = V * B' + f * e_j'.  Each
// expansion appends v = f/|f|, projects op*v against U to fill B's next
// column, and refreshes f.  At the working size the projected SVD B = P S Q'
// yields Ritz values S and residual estimates |f| * |last row of P|; a thick
// restart compresses the bases to the leading Ritz vectors and keeps f, whose
// coupling to the kept columns lands back in B on the next expansion.
class LanczosBidiag {
 public:
  LanczosBidiag(const CenteredScaledOperator& op, Index p,
                const SvdOptions& options, const Vector* warm_start)
      : op_(op),
        options_(options),
        p_(p),
        work_(std::min<Index>(p + 7, op.max_rank())),
        rng_(options.seed),
        u_basis_(op.rows(), work_),
        v_basis_(op.cols(), work_),
        b_(Matrix::Zero(work_, work_)) {
    Vector v0;
    if (warm_start != nullptr && warm_start->size() == op.cols() &&
        warm_start->norm() > 0.0) {
      v0 = *warm_start / warm_start->norm();
      orthogonalize(v_basis_, 0, v0);  // no-op, keeps the code path uniform
    } else {
      random_orthonormal(rng_, v_basis_, 0, v0);
    }
    expand(v0);
  }

  TruncatedSVD run() {
    double best_residual = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart <= options_.max_restarts; ++restart) {
      while (active_ < work_) {
        Vector v_next;
        if (!next_direction(v_next)) break;  // row space exhausted
        expand(v_next);
      }
      const SmallSvd small = project_svd(b_, active_);
      if (small.sv.size() > 0) {
        sigma_est_ = std::max(sigma_est_, small.sv[0]);
      }
      const double fnorm = f_.norm();
      double worst = 0.0;
      const Index checked = std::min<Index>(p_, small.sv.size());
      for (Index i = 0; i < checked; ++i) {
        worst = std::max(worst, fnorm * std::abs(small.P(active_ - 1, i)));
      }
      best_residual = std::min(best_residual, worst);
      const double target = options_.tol * std::max(sigma_est_, kEps);
      if (worst <= target || active_ < work_) {
        // Either converged or the Krylov space ran out of directions, in
        // which case the projected problem already is the operator.
        return extract(u_basis_, v_basis_, active_, small, p_,
                       options_.rank_cutoff);
      }
      thick_restart(small);
    }
    std::ostringstream msg;
    msg << "singular value iteration did not converge within "
        << options_.max_restarts << " restarts (best residual "
        << best_residual << ", tolerance "
        << options_.tol * std::max(sigma_est_, kEps) << ")";
    throw ConvergenceError(msg.str(), best_residual);
  }

 private:
  // Produces the next unit direction orthogonal to V, preferring the
  // residual.  A tiny residual means the Krylov space stalled; restart from
  // a random direction so exactly-orthogonal start vectors or repeated
  // singular values cannot hide part of the spectrum.
  bool next_direction(Vector& v_next) {
    const double beta = f_.norm();
    if (beta > 100.0 * kEps * std::max(sigma_est_, 1.0)) {
      v_next = f_ / beta;
      return true;
    }
    return random_orthonormal(rng_, v_basis_, active_, v_next);
  }

  void expand(const Vector& v_new) {
    const Index j = active_;
    v_basis_.col(j) = v_new;
    Vector u = op_.apply(v_new);
    if (j > 0) {
      const auto uj = u_basis_.leftCols(j);
      Vector g = uj.transpose() * u;
      u.noalias() -= uj * g;
      Vector g2 = uj.transpose() * u;
      u.noalias() -= uj * g2;
      g += g2;
      b_.col(j).head(j) = g;
    }
    double alpha = u.norm();
    if (alpha > 100.0 * kEps * std::max(sigma_est_, alpha)) {
      u_basis_.col(j) = u / alpha;
    } else {
      // op * v_new lies in the span of U: the operator is rank-deficient
      // along this direction.  Keep the basis orthonormal with a fresh
      // column so later projections stay well defined.
      alpha = 0.0;
      Vector u_fresh;
      if (random_orthonormal(rng_, u_basis_, j, u_fresh)) {
        u_basis_.col(j) = u_fresh;
      } else {
        u_basis_.col(j).setZero();  // rows exhausted; dead column
      }
    }
    b_(j, j) = alpha;
    sigma_est_ = std::max(sigma_est_, alpha);
    f_ = op_.apply_transpose(u_basis_.col(j));
    orthogonalize(v_basis_, j + 1, f_);
    active_ = j + 1;
  }

  void thick_restart(const SmallSvd& small) {
    Index keep = std::min<Index>(p_ + 3, work_ - 3);
    if (keep < 0) keep = 0;
    if (keep > work_ - 1) keep = work_ - 1;  // leave room to expand
    Matrix u_kept;
    u_kept.noalias() = u_basis_.leftCols(active_) * small.P.leftCols(keep);
    Matrix v_kept;
    v_kept.noalias() = v_basis_.leftCols(active_) * small.Q.leftCols(keep);
    u_basis_.leftCols(keep) = u_kept;
    v_basis_.leftCols(keep) = v_kept;
    b_.setZero();
    b_.topLeftCorner(keep, keep).diagonal() = small.sv.head(keep);
    active_ = keep;
    // f is already orthogonal to the kept V columns (they lie in the old
    // span); one cleanup pass guards against roundoff accumulating across
    // many restarts.
    orthogonalize(v_basis_, active_, f_);
  }

  const CenteredScaledOperator& op_;
  SvdOptions options_;
  Index p_;
  Index work_;
  NormalSampler rng_;
  Matrix u_basis_;
  Matrix v_basis_;
  Matrix b_;
  Vector f_;
  Index active_ = 0;
  double sigma_est_ = 0.0;
};

TruncatedSVD dense_svd(const CenteredScaledOperator& op, Index p,
                       const SvdOptions& options) {
  const Matrix b = op.materialize();
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SmallSvd small{svd.matrixU(), svd.matrixV(), svd.singularValues()};
  const double cutoff =
      small.sv.size() > 0 ? options.rank_cutoff * small.sv[0] : 0.0;
  Index kept = 0;
  while (kept < p && kept < small.sv.size() && small.sv[kept] > cutoff) {
    ++kept;
  }
  TruncatedSVD out;
  out.p = kept;
  out.s = small.sv.head(kept);
  out.U = small.P.leftCols(kept);
  out.V = small.Q.leftCols(kept);
  out.rank_deficient = kept < p;
  return out;
}

SvdMethod resolve_method(const CenteredScaledOperator& op,
                         const SvdOptions& options) {
  if (options.method != SvdMethod::Auto) return options.method;
  return std::min(op.rows(), op.cols()) <= 200 ? SvdMethod::Dense
                                               : SvdMethod::Lanczos;
}

TruncatedSVD solve(const CenteredScaledOperator& op, Index p,
                   const SvdOptions& options, const Vector* warm_start) {
  if (p < 1 || p > op.max_rank()) {
    std::ostringstream msg;
    msg << "requested rank " << p << " outside [1, " << op.max_rank()
        << "] for a " << op.rows() << "x" << op.cols() << " operator";
    throw ConfigError(msg.str());
  }
  if (resolve_method(op, options) == SvdMethod::Dense) {
    return dense_svd(op, p, options);
  }
  LanczosBidiag solver(op, p, options, warm_start);
  return solver.run();
}

}  // namespace

TruncatedSVD truncated_svd(const CenteredScaledOperator& op, Index p,
                           const SvdOptions& options) {
  return solve(op, p, options, nullptr);
}

TruncatedSVD extend(const TruncatedSVD& svd, const CenteredScaledOperator& op,
                    Index p_new, const SvdOptions& options) {
  if (p_new <= svd.p) {
    std::ostringstream msg;
    msg << "extended rank " << p_new << " must exceed current rank " << svd.p;
    throw ConfigError(msg.str());
  }
  if (svd.p > 0) {
    const Vector seed = svd.V.col(0);
    return solve(op, p_new, options, &seed);
  }
  return solve(op, p_new, options, nullptr);
}

}  // namespace tcor
