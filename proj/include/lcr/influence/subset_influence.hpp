#pragma once

#include <cmath>
#include <limits>

#include "lcr/core/least_squares.hpp"
#include "lcr/core/leverage.hpp"
#include "lcr/core/row_subset.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/influence/single_row.hpp"

namespace lcr {

struct SubsetInfluence {
  RowSubset subset;
  double spec = 0;      ///< ||P_A||_2
  double weight = 0;    ///< (1 - spec)^2 / spec, zero at rank loss
  double q_weight = 0;  ///< sum_{i in A} 1/ell_i
  double theta = 0;     ///< acceptance ratio weight / ((d/k^2) q_weight)
};

/// Acceptance ratio evaluated in log space; (1 - spec)^2 can underflow long
/// before theta itself is negligible.
inline double acceptance_ratio(double spec, double q_weight, Eigen::Index d, std::size_t k) {
  if (spec >= kSingularProjection || !(spec > 0.0)) return 0.0;
  const double kk = double(k);
  const double log_theta =
      2.0 * std::log1p(-spec) - std::log(spec) - std::log(double(d) / (kk * kk)) - std::log(q_weight);
  return std::exp(log_theta);
}

inline SubsetInfluence subset_influence(const ThinSvd& svd, const LeverageProfile& profile, const RowSubset& A) {
  SubsetInfluence out{A};
  out.spec = partial_projection_norm(svd, A);
  out.weight = influence_weight(out.spec);
  for (auto i : A.indices()) out.q_weight += 1.0 / profile.ell(Eigen::Index(i));
  out.theta = acceptance_ratio(out.spec, out.q_weight, profile.d, A.k());
  return out;
}

}  // namespace lcr
