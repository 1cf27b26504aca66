#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <string>

#include "lcr/core/dataset.hpp"
#include "lcr/error.hpp"

namespace lcr {

/// Ratio sigma_d / sigma_1 below which a design is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-12;

/// Thin SVD X = U diag(sigma) V^T with U n x d, sigma nonincreasing, V d x d.
struct ThinSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;

  Eigen::Index n() const noexcept { return U.rows(); }
  Eigen::Index d() const noexcept { return U.cols(); }

  /// sigma_1 / sigma_d.
  double kappa() const { return sigma(0) / sigma(sigma.size() - 1); }

  /// sum_i (sigma_1 / sigma_i)^2, the squared scaled condition number.
  double scaled_condition_sq() const { return (sigma(0) / sigma.array()).square().sum(); }

  Eigen::MatrixXd reconstruct() const { return U * sigma.asDiagonal() * V.transpose(); }
};

namespace detail {

// Flip column pairs so the largest-magnitude entry of each U column is
// positive; ties go to the lowest row index.
inline void canonicalize_signs(ThinSvd& svd) {
  for (Eigen::Index j = 0; j < svd.U.cols(); ++j) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < svd.U.rows(); ++i) {
      const double a = std::abs(svd.U(i, j));
      if (a > best_abs) {
        best_abs = a;
        best = i;
      }
    }
    if (svd.U(best, j) < 0.0) {
      svd.U.col(j) *= -1.0;
      svd.V.col(j) *= -1.0;
    }
  }
}

}  // namespace detail

/// Thin SVD of an arbitrary tall matrix with the canonical sign convention.
/// Throws RankDeficient when sigma_d / sigma_1 < kRankTolerance.
inline ThinSvd thin_svd(const Eigen::MatrixXd& X) {
  if (X.rows() < X.cols() || X.cols() < 1)
    fail(ErrorCode::InvalidDimension, "thin_svd expects a tall matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> solver(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd svd{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  const double top = svd.sigma(0);
  const double bottom = svd.sigma(svd.sigma.size() - 1);
  if (!(top > 0.0) || bottom / top < kRankTolerance)
    fail(ErrorCode::RankDeficient, "sigma_d/sigma_1 = " + std::to_string(top > 0.0 ? bottom / top : 0.0));
  detail::canonicalize_signs(svd);
  return svd;
}

inline ThinSvd thin_svd(const Dataset& data) { return thin_svd(data.X()); }

}  // namespace lcr
