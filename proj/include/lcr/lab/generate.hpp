#pragma once

// Synthetic designs: gaussian, uniform-leverage Hadamard columns, and a
// coherent design whose first rows are scaled up to concentrate leverage.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>

#include "lcr/core/dataset.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/lab/config.hpp"
#include "lcr/rng.hpp"

namespace lcr::lab {

inline constexpr double kSpikeScale = 1e3;

struct GeneratedProblem {
  Dataset data;
  Eigen::VectorXd w_planted;
};

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& rng) {
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = rng.normal();
  return M;
}

/// First `cols` columns of the n x n Sylvester Hadamard matrix, scaled by 1/sqrt(n).
inline Eigen::MatrixXd hadamard_columns(std::size_t n, std::size_t cols) {
  Eigen::MatrixXd H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  const double s = 1.0 / std::sqrt(double(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cols; ++j) H(Eigen::Index(i), Eigen::Index(j)) = (std::popcount(i & j) % 2 ? -s : s);
  return H;
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index d, RngStream& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(d, d, rng));
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j)
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  return Q;
}

inline Eigen::MatrixXd generate_design(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto n = Eigen::Index(cfg.n), d = Eigen::Index(cfg.d);
  RngStream rng(cfg.seed, 101);
  Eigen::MatrixXd X;
  switch (cfg.design) {
    case DesignKind::Gaussian:
      X = gaussian_matrix(n, d, rng);
      break;
    case DesignKind::HadamardUniform:
      X = hadamard_columns(cfg.n, cfg.d);
      break;
    case DesignKind::Coherent: {
      X = gaussian_matrix(n, d, rng);
      const auto spikes = std::max<Eigen::Index>(1, Eigen::Index(std::llround(cfg.spike_fraction * double(n))));
      X.topRows(spikes) *= kSpikeScale;
      break;
    }
  }
  if (cfg.kappa > 1.0) {
    // Keep the left factor (and so the leverage profile), replace sigma and V.
    const ThinSvd svd = thin_svd(X);
    RngStream vrng(cfg.seed, 102);
    Eigen::VectorXd sigma(d);
    for (Eigen::Index i = 0; i < d; ++i)
      sigma(i) = d == 1 ? 1.0 : std::pow(cfg.kappa, -double(i) / double(d - 1));
    X = svd.U * sigma.asDiagonal() * random_orthogonal(d, vrng).transpose();
  }
  return X;
}

/// Labels y = X w + noise * g with w and g standard normal.
inline GeneratedProblem generate_problem(const ExperimentConfig& cfg) {
  Eigen::MatrixXd X = generate_design(cfg);
  RngStream wrng(cfg.seed, 103);
  RngStream grng(cfg.seed, 104);
  Eigen::VectorXd w = gaussian_matrix(X.cols(), 1, wrng);
  Eigen::VectorXd y = X * w;
  if (cfg.noise > 0.0) y += cfg.noise * Eigen::VectorXd(gaussian_matrix(X.rows(), 1, grng));
  return {Dataset(std::move(X), std::move(y)), std::move(w)};
}

inline Dataset generate_dataset(const ExperimentConfig& cfg) { return generate_problem(cfg).data; }

}  // namespace lcr::lab
