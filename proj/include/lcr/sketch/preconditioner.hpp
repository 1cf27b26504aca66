#pragma once

// R = T P from a column-pivoted QR of a sketch Pi X = Q T P. R^{-1} = P^T T^{-1}
// is applied by triangular substitution and never formed.

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "lcr/error.hpp"
#include "lcr/sketch/operator.hpp"

namespace lcr {

class Preconditioner {
 public:
  /// `T` upper triangular; `perm[j]` is the original column that the pivoted
  /// QR moved to position j.
  Preconditioner(Eigen::MatrixXd T, std::vector<Eigen::Index> perm) : T_(std::move(T)), perm_(std::move(perm)) {
    const double scale = T_.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < T_.rows(); ++i)
      if (!(std::abs(T_(i, i)) >= 1e-12 * scale))
        fail(ErrorCode::SketchRankDeficient, "pivot " + std::to_string(i) + " of the sketch factor vanishes");
  }

  Eigen::Index d() const noexcept { return T_.rows(); }
  const Eigen::MatrixXd& T() const noexcept { return T_; }
  const std::vector<Eigen::Index>& permutation() const noexcept { return perm_; }

  /// Dense R = T P, where (P w)_j = w_{perm[j]}.
  Eigen::MatrixXd R() const {
    Eigen::MatrixXd R(d(), d());
    for (Eigen::Index j = 0; j < d(); ++j) R.col(perm_[std::size_t(j)]) = T_.col(j);
    return R;
  }

  /// Permutation matrix P as 0/1 entries.
  Eigen::MatrixXd P() const {
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(d(), d());
    for (Eigen::Index j = 0; j < d(); ++j) P(j, perm_[std::size_t(j)]) = 1.0;
    return P;
  }

  /// R w in O(d^2).
  Eigen::VectorXd apply(const Eigen::VectorXd& w) const {
    Eigen::VectorXd pw(d());
    for (Eigen::Index j = 0; j < d(); ++j) pw(j) = w(perm_[std::size_t(j)]);
    return T_.triangularView<Eigen::Upper>() * pw;
  }

  /// R^{-1} v = P^T T^{-1} v in O(d^2).
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& v) const {
    const Eigen::VectorXd z = T_.triangularView<Eigen::Upper>().solve(v);
    Eigen::VectorXd out(d());
    for (Eigen::Index j = 0; j < d(); ++j) out(perm_[std::size_t(j)]) = z(j);
    return out;
  }

  /// M R^{-1} for row vectors stacked in M (m x d): one triangular solve with
  /// m right-hand sides.
  Eigen::MatrixXd right_apply_inverse(const Eigen::MatrixXd& M) const {
    if (M.cols() != d()) fail(ErrorCode::DimensionMismatch, "right_apply_inverse expects d columns");
    Eigen::MatrixXd permuted(M.rows(), d());
    for (Eigen::Index j = 0; j < d(); ++j) permuted.col(j) = M.col(perm_[std::size_t(j)]);
    T_.triangularView<Eigen::Upper>().solveInPlace<Eigen::OnTheRight>(permuted);
    return permuted;
  }

 private:
  Eigen::MatrixXd T_;
  std::vector<Eigen::Index> perm_;
};

inline Preconditioner build_preconditioner(const Eigen::MatrixXd& X, const SketchOperator& op) {
  if (op.r < std::size_t(X.cols()))
    fail(ErrorCode::SketchRankDeficient, "sketch dimension " + std::to_string(op.r) + " is below d");
  const Eigen::MatrixXd sketched = apply_sketch(op, X);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sketched);
  const auto d = X.cols();
  Eigen::MatrixXd T = qr.matrixR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  const auto& idx = qr.colsPermutation().indices();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) perm[std::size_t(j)] = idx(j);
  return Preconditioner(std::move(T), std::move(perm));
}

}  // namespace lcr
