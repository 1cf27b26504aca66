#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "lcr/core/svd.hpp"
#include "lcr/error.hpp"

namespace lcr {

inline constexpr double kLeverageFloor = 1e-14;

/// Per-row leverage scores with the coherence and the single-row normalizer.
struct LeverageProfile {
  Eigen::VectorXd ell;       ///< ell_i = ||u_i||^2, clamped into [kLeverageFloor, 1]
  double coherence_mu = 0;   ///< (1/n) sum_i 1/ell_i
  double z1 = 0;             ///< sum_i (1 - ell_i)^2 / ell_i
  Eigen::Index d = 0;

  Eigen::Index n() const noexcept { return ell.size(); }

  /// Builds a profile from given scores; they must sum to d within 1e-8.
  static LeverageProfile from_scores(const Eigen::VectorXd& scores, Eigen::Index d) {
    if (d < 1 || scores.size() <= d)
      fail(ErrorCode::InvalidDimension, "leverage profile needs n > d >= 1");
    LeverageProfile p;
    p.d = d;
    p.ell = scores.unaryExpr([](double l) { return std::clamp(l, kLeverageFloor, 1.0); });
    if (std::abs(p.ell.sum() - double(d)) > 1e-8)
      fail(ErrorCode::InvalidDimension, "leverage scores sum to " + std::to_string(p.ell.sum()) + ", expected d");
    p.coherence_mu = p.ell.array().inverse().mean();
    p.z1 = ((1.0 - p.ell.array()).square() / p.ell.array()).sum();
    return p;
  }
};

inline LeverageProfile leverage_scores(const ThinSvd& svd) {
  return LeverageProfile::from_scores(svd.U.rowwise().squaredNorm(), svd.d());
}

}  // namespace lcr
