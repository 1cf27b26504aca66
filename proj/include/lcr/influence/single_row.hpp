#pragma once

#include <Eigen/Dense>

#include "lcr/core/least_squares.hpp"
#include "lcr/core/leverage.hpp"
#include "lcr/error.hpp"

namespace lcr {

/// Unnormalized influence of removing a set whose partial projection has
/// spectral norm `spec`: (1 - spec)^2 / spec, and exactly 0 once removal would
/// lose rank.
inline double influence_weight(double spec) {
  if (spec >= kSingularProjection) return 0.0;
  const double gap = 1.0 - spec;
  return gap * gap / spec;
}

inline Eigen::VectorXd single_row_weights(const LeverageProfile& profile) {
  return profile.ell.unaryExpr([](double l) { return influence_weight(l); });
}

/// p_i proportional to (1 - ell_i)^2 / ell_i.
inline Eigen::VectorXd single_row_influences(const LeverageProfile& profile) {
  Eigen::VectorXd w = single_row_weights(profile);
  const double total = w.sum();
  if (!(total > 0.0)) fail(ErrorCode::DegenerateDistribution, "every row has leverage 1");
  return w / total;
}

}  // namespace lcr
