#pragma once

#include <Eigen/Dense>

#include <string>

#include "lcr/error.hpp"
#include "lcr/sketch/operator.hpp"
#include "lcr/sketch/preconditioner.hpp"

namespace lcr {

struct ApproxLeverage {
  Eigen::VectorXd ell_hat;
};

/// Exact squared row norms of X R^{-1}.
inline Eigen::VectorXd preconditioned_row_norms(const Eigen::MatrixXd& X, const Preconditioner& precond) {
  return precond.right_apply_inverse(X).rowwise().squaredNorm();
}

/// ell_hat_i = ||e_i^T X R^{-1} Pi_2||^2 where `row_sketch` maps d-vectors to
/// r_2 dimensions. Pi_2 is applied to the transpose, (X R^{-1})^T, so the
/// estimates are the squared column norms of the sketch.
inline ApproxLeverage approx_leverage(const Eigen::MatrixXd& X, const Preconditioner& precond,
                                      const SketchOperator& row_sketch) {
  if (row_sketch.n_in != std::size_t(X.cols()))
    fail(ErrorCode::DimensionMismatch, "row sketch input dimension " + std::to_string(row_sketch.n_in) +
                                           " differs from d = " + std::to_string(X.cols()));
  const Eigen::MatrixXd conditioned = precond.right_apply_inverse(X);
  const Eigen::MatrixXd sketched = apply_sketch(row_sketch, conditioned.transpose());
  ApproxLeverage out{sketched.colwise().squaredNorm().transpose()};
  for (Eigen::Index i = 0; i < out.ell_hat.size(); ++i)
    if (!(out.ell_hat(i) > 0.0)) out.ell_hat(i) = 1e-300;
  return out;
}

}  // namespace lcr
