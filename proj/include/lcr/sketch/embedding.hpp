#pragma once

// Quality of a sketch as a subspace embedding: the defect ||I - (Pi U)^T Pi U||_2
// and the derived spectral facts that follow whenever the defect is below 1.

#include <Eigen/Dense>

#include <cmath>

#include "lcr/sketch/operator.hpp"

namespace lcr {

inline double spectral_norm(const Eigen::MatrixXd& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  return svd.singularValues()(0);
}

inline Eigen::MatrixXd pseudo_inverse(const Eigen::MatrixXd& M) {
  return Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(M).pseudoInverse();
}

/// ||I_d - (Pi U)^T (Pi U)||_2 for an already sketched orthonormal basis.
inline double embedding_defect(const Eigen::MatrixXd& sketched_basis) {
  const auto d = sketched_basis.cols();
  const Eigen::MatrixXd gap = Eigen::MatrixXd::Identity(d, d) - sketched_basis.transpose() * sketched_basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gap, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

inline double jlt_defect(const SketchOperator& op, const Eigen::MatrixXd& U) {
  return embedding_defect(apply_sketch(op, U));
}

struct EmbeddingProperties {
  double defect = 0;
  Eigen::VectorXd sigma;               ///< singular values of Pi U
  Eigen::Index rank = 0;
  double sigma_sq_deviation = 0;       ///< max |1 - sigma_i^2|
  double sigma_inverse_gap = 0;        ///< max |sigma_i - 1/sigma_i|
  double inverse_sq_gap = 0;           ///< max |1 - 1/sigma_i^2|
  double pinv_transpose_gap = 0;       ///< ||(Pi U)^+ - (Pi U)^T||_2
  double pinv_gram_gap = 0;            ///< ||I - (Pi U)^+ (Pi U)^+T||_2

  /// All five consequences of a defect e < 1, each with `slack` absolute room.
  bool holds(double slack = 1e-8) const {
    const double e = defect;
    if (!(e < 1.0)) return false;
    const Eigen::Index d = sigma.size();
    return rank == d && sigma_sq_deviation <= e + slack && sigma_inverse_gap <= e / std::sqrt(1.0 - e) + slack &&
           inverse_sq_gap <= e / (1.0 - e) + slack && pinv_transpose_gap <= e / std::sqrt(1.0 - e) + slack &&
           pinv_gram_gap <= e / (1.0 - e) + slack;
  }
};

inline EmbeddingProperties embedding_properties(const Eigen::MatrixXd& sketched_basis) {
  EmbeddingProperties p;
  const auto d = sketched_basis.cols();
  p.defect = embedding_defect(sketched_basis);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sketched_basis);
  p.sigma = svd.singularValues();
  const double tol = 1e-12 * std::max(1.0, p.sigma(0));
  p.rank = (p.sigma.array() > tol).count();
  if (p.rank < d) return p;
  const Eigen::ArrayXd s = p.sigma.array();
  p.sigma_sq_deviation = (1.0 - s.square()).abs().maxCoeff();
  p.sigma_inverse_gap = (s - s.inverse()).abs().maxCoeff();
  p.inverse_sq_gap = (1.0 - s.square().inverse()).abs().maxCoeff();
  const Eigen::MatrixXd pinv = pseudo_inverse(sketched_basis);
  p.pinv_transpose_gap = spectral_norm(pinv - sketched_basis.transpose());
  p.pinv_gram_gap = spectral_norm(Eigen::MatrixXd::Identity(d, d) - pinv * pinv.transpose());
  return p;
}

/// Relative residual of (Pi A)^+ = V Sigma^{-1} (Pi U)^+ for A = U Sigma V^T.
inline double pinv_factorization_residual(const Eigen::MatrixXd& sketched_A, const Eigen::MatrixXd& sketched_basis,
                                          const Eigen::VectorXd& sigma, const Eigen::MatrixXd& V) {
  const Eigen::MatrixXd lhs = pseudo_inverse(sketched_A);
  const Eigen::MatrixXd rhs = V * sigma.cwiseInverse().asDiagonal() * pseudo_inverse(sketched_basis);
  return (lhs - rhs).norm() / std::max(1e-300, rhs.norm());
}

}  // namespace lcr
