#pragma once

// Full and deficient least squares, and the closed-form leave-A-out error.

#include <Eigen/Dense>

#include <algorithm>
#include <string>

#include "lcr/core/dataset.hpp"
#include "lcr/core/leverage.hpp"
#include "lcr/core/row_subset.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/error.hpp"

namespace lcr {

/// Largest admissible ||P_A||_2 before I - P_A is treated as singular.
inline constexpr double kSingularProjection = 1.0 - 1e-10;

struct FullSolution {
  Eigen::VectorXd w_star;
  Eigen::VectorXd residual;  ///< X w* - y
  double opt_error = 0;      ///< ||X w* - y||^2
};

/// Everything about the full regression that the subset routines reuse.
struct FittedProblem {
  ThinSvd svd;
  FullSolution full;
};

inline FullSolution full_solve(const Dataset& data, const ThinSvd& svd) {
  const Eigen::VectorXd& y = data.y();
  FullSolution sol;
  sol.w_star = svd.V * (svd.U.transpose() * y).cwiseQuotient(svd.sigma);
  sol.residual = data.X() * sol.w_star - y;
  sol.opt_error = sol.residual.squaredNorm();
  return sol;
}

inline FullSolution full_solve(const Dataset& data) { return full_solve(data, thin_svd(data)); }

inline FittedProblem fit(const Dataset& data) {
  ThinSvd svd = thin_svd(data);
  FullSolution full = full_solve(data, svd);
  return {std::move(svd), std::move(full)};
}

/// Largest eigenvalue of the symmetric PSD matrix G, clamped to [0, 1].
inline double top_eigenvalue_unit(const Eigen::MatrixXd& G) {
  if (G.rows() == 1) return std::clamp(G(0, 0), 0.0, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  return std::clamp(eig.eigenvalues().maxCoeff(), 0.0, 1.0);
}

/// ||P_A||_2 = ||U_A||_2^2 given the gathered rows U_A (k x d), using the
/// smaller of the two Gram matrices.
inline double spectral_norm_sq_rows(const Eigen::MatrixXd& UA) {
  if (UA.rows() <= UA.cols()) return top_eigenvalue_unit(UA * UA.transpose());
  return top_eigenvalue_unit(UA.transpose() * UA);
}

inline double partial_projection_norm(const ThinSvd& svd, const RowSubset& A) {
  if (A.n() != std::size_t(svd.n())) fail(ErrorCode::DimensionMismatch, "subset built for a different n");
  return spectral_norm_sq_rows(A.gather(svd.U));
}

struct DeficientFit {
  Eigen::VectorXd w_minus;
  double full_error = 0;      ///< ||X w_minus - y||^2 on the complete data
  double error_increase = 0;  ///< full_error - optimal error
};

namespace detail {

// z = (I_k - U_A U_A^T)^{-1} (A w* - y_A); shared by the Woodbury update and
// the closed-form error.
struct ReducedSystem {
  Eigen::MatrixXd UA;
  Eigen::VectorXd z;
};

inline ReducedSystem reduced_system(const FittedProblem& fitted, const RowSubset& A) {
  if (A.n() != std::size_t(fitted.svd.n())) fail(ErrorCode::DimensionMismatch, "subset built for a different n");
  ReducedSystem rs{A.gather(fitted.svd.U), {}};
  const double spec = spectral_norm_sq_rows(rs.UA);
  if (spec > kSingularProjection)
    fail(ErrorCode::SingularDeficientSystem,
         "||P_A||_2 = " + std::to_string(spec) + " leaves the remaining rows rank deficient");
  const auto k = rs.UA.rows();
  const Eigen::MatrixXd I_minus_P = Eigen::MatrixXd::Identity(k, k) - rs.UA * rs.UA.transpose();
  rs.z = I_minus_P.llt().solve(A.gather(fitted.full.residual));
  return rs;
}

}  // namespace detail

/// Least squares on the data with the rows of A removed, via the Woodbury update
/// w_minus = w* + V Sigma^{-1} U_A^T (I - P_A)^{-1} (A w* - y_A).
inline DeficientFit deficient_solve(const Dataset& data, const FittedProblem& fitted, const RowSubset& A) {
  const auto rs = detail::reduced_system(fitted, A);
  DeficientFit fitres;
  fitres.w_minus = fitted.full.w_star +
                   fitted.svd.V * (rs.UA.transpose() * rs.z).cwiseQuotient(fitted.svd.sigma);
  fitres.full_error = (data.X() * fitres.w_minus - data.y()).squaredNorm();
  fitres.error_increase = fitres.full_error - fitted.full.opt_error;
  return fitres;
}

inline DeficientFit deficient_solve(const Dataset& data, const RowSubset& A) {
  return deficient_solve(data, fit(data), A);
}

/// Increase term (A w* - y_A)^T Q (A w* - y_A) with Q = (I-P_A)^{-1} P_A (I-P_A)^{-1}.
/// With z = (I-P_A)^{-1} r_A the form is z^T U_A U_A^T z, which is never negative.
inline double leave_A_out_increase(const FittedProblem& fitted, const RowSubset& A) {
  const auto rs = detail::reduced_system(fitted, A);
  return (rs.UA.transpose() * rs.z).squaredNorm();
}

/// ||X w_A^- - y||^2 from the closed form; the deficient system is never solved.
inline double leave_A_out_error(const FittedProblem& fitted, const RowSubset& A) {
  return fitted.full.opt_error + leave_A_out_increase(fitted, A);
}

inline double leave_A_out_error(const Dataset& data, const RowSubset& A) { return leave_A_out_error(fit(data), A); }

}  // namespace lcr
