#pragma once

// Rejection sampler for the joint influence distribution over k-subsets.
//
// Proposals come from the sum-over-rows sampler with f = 1/ell_i; a proposal A
// is accepted with probability theta_A, so accepted subsets follow
// p_A proportional to (1 - ||P_A||_2)^2 / ||P_A||_2 exactly.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>

#include "lcr/core/leverage.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/error.hpp"
#include "lcr/influence/subset_influence.hpp"
#include "lcr/influence/sum_sampler.hpp"
#include "lcr/rng.hpp"

namespace lcr {

struct RejectionResult {
  SubsetInfluence accepted;
  std::size_t trials = 0;  ///< proposals drawn, including the accepted one

  const RowSubset& subset() const noexcept { return accepted.subset; }
};

/// k^2 / (n mu): proven lower bound on the acceptance probability when n >= 8dk.
inline double acceptance_lower_bound(const LeverageProfile& profile, std::size_t k) {
  return double(k) * double(k) / (double(profile.n()) * profile.coherence_mu);
}

/// ceil(50 n mu / k^2), fifty times the expected trial count from the bound.
inline std::size_t default_max_trials(const LeverageProfile& profile, std::size_t k) {
  return std::size_t(std::ceil(50.0 / acceptance_lower_bound(profile, k)));
}

class RejectionSampler {
 public:
  RejectionSampler(const ThinSvd& svd, const LeverageProfile& profile, std::size_t k)
      : svd_(&svd), profile_(&profile), k_(k), proposal_(profile.ell.array().inverse().matrix()) {
    if (k < 1 || k >= std::size_t(profile.n()))
      fail(ErrorCode::InvalidK, "k=" + std::to_string(k) + " must satisfy 1 <= k < n");
    if (profile.n() != svd.n()) fail(ErrorCode::DimensionMismatch, "profile and factorization disagree on n");
  }

  std::size_t k() const noexcept { return k_; }
  const SumOverRowsSampler& proposal() const noexcept { return proposal_; }

  RejectionResult sample(RngStream& rng, std::size_t max_trials) const {
    if (max_trials < 1) fail(ErrorCode::InvalidConfig, "max_trials must be >= 1");
    for (std::size_t trial = 1; trial <= max_trials; ++trial) {
      RowSubset A = proposal_.sample(k_, rng);
      SubsetInfluence inf = subset_influence(*svd_, *profile_, A);
      // theta = 0 for rank-losing subsets, so they are never returned.
      if (rng.uniform() < inf.theta) return {std::move(inf), trial};
    }
    std::ostringstream msg;
    msg << "no subset accepted in " << max_trials << " proposals (empirical acceptance rate 0/" << max_trials
        << ", lower bound k^2/(n mu) = " << acceptance_lower_bound(*profile_, k_) << ")";
    fail(ErrorCode::TrialBudgetExceeded, msg.str());
  }

  RejectionResult sample(RngStream& rng) const { return sample(rng, default_max_trials(*profile_, k_)); }

 private:
  const ThinSvd* svd_;
  const LeverageProfile* profile_;
  std::size_t k_;
  SumOverRowsSampler proposal_;
};

inline RejectionResult rejection_sample_subset(const ThinSvd& svd, const LeverageProfile& profile, std::size_t k,
                                               RngStream& rng, std::size_t max_trials) {
  return RejectionSampler(svd, profile, k).sample(rng, max_trials);
}

struct AcceptanceEstimate {
  double lower_bound = 0;
  bool precondition_met = false;  ///< n >= 8dk, where the bound is proven

  /// Throws PreconditionNotMet when the bound is only a heuristic.
  double require_proven() const {
    if (!precondition_met) fail(ErrorCode::PreconditionNotMet, "acceptance bound needs n >= 8dk");
    return lower_bound;
  }
};

inline AcceptanceEstimate estimate_acceptance(const LeverageProfile& profile, std::size_t k) {
  return {acceptance_lower_bound(profile, k),
          double(profile.n()) >= 8.0 * double(profile.d) * double(k)};
}

}  // namespace lcr
