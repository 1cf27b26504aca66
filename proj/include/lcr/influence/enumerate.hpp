#pragma once

// Brute-force enumeration of the joint influence distribution. Exponential in
// k; used as the reference distribution at small n.

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "lcr/core/leverage.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/csv.hpp"
#include "lcr/error.hpp"
#include "lcr/influence/combinatorics.hpp"
#include "lcr/influence/subset_influence.hpp"

namespace lcr {

inline constexpr double kMaxEnumeration = 2e6;

struct SubsetProbability {
  SubsetInfluence influence;
  double probability = 0;
};

struct SubsetDistribution {
  std::vector<SubsetProbability> entries;  ///< lexicographic order
  double normalizer = 0;                   ///< sum of unnormalized weights over all k-subsets
  double mean_spec = 0;                    ///< average ||P_A||_2 over all k-subsets
  std::size_t k = 0;
};

inline void check_enumerable(std::size_t n, std::size_t k) {
  const double count = binomial(n, k);
  if (count > kMaxEnumeration)
    fail(ErrorCode::TooLarge, "C(" + std::to_string(n) + "," + std::to_string(k) + ") = " + std::to_string(count) +
                                  " subsets exceeds the enumeration limit");
}

inline SubsetDistribution enumerate_subset_distribution(const ThinSvd& svd, const LeverageProfile& profile,
                                                        std::size_t k) {
  const auto n = std::size_t(svd.n());
  if (k < 1 || k > n) fail(ErrorCode::InvalidK, "k=" + std::to_string(k) + " not in [1, n]");
  check_enumerable(n, k);
  SubsetDistribution dist;
  dist.k = k;
  dist.entries.reserve(std::size_t(binomial(n, k)));
  double spec_sum = 0.0;
  for_each_combination(n, k, [&](const std::vector<std::size_t>& idx) {
    SubsetProbability e{subset_influence(svd, profile, RowSubset(idx, n))};
    dist.normalizer += e.influence.weight;
    spec_sum += e.influence.spec;
    dist.entries.push_back(std::move(e));
  });
  dist.mean_spec = spec_sum / double(dist.entries.size());
  if (!(dist.normalizer > 0.0))
    fail(ErrorCode::DegenerateDistribution, "every " + std::to_string(k) + "-subset loses rank when removed");
  for (auto& e : dist.entries) e.probability = e.influence.weight / dist.normalizer;
  return dist;
}

/// Probability that a single proposal is accepted, sum_A q_A theta_A, from the
/// enumerated normalizer.
inline double exact_acceptance_probability(const LeverageProfile& profile, const SubsetDistribution& dist) {
  const double k = double(dist.k);
  const double inv_sum = profile.ell.array().inverse().sum();
  return dist.normalizer /
         ((double(profile.d) / (k * k)) * binomial(std::size_t(profile.n()) - 1, dist.k - 1) * inv_sum);
}

/// sum over all k-subsets of 1 / ||U_A||_F^2.
inline double inverse_frobenius_sum(const LeverageProfile& profile, std::size_t k) {
  const auto n = std::size_t(profile.n());
  check_enumerable(n, k);
  double total = 0.0;
  for_each_combination(n, k, [&](const std::vector<std::size_t>& idx) {
    double fro = 0.0;
    for (auto i : idx) fro += profile.ell(Eigen::Index(i));
    total += 1.0 / fro;
  });
  return total;
}

/// CSV export: header `subset,probability`, indices joined with ';'.
inline void write_distribution_csv(std::ostream& out, const SubsetDistribution& dist) {
  out << "subset,probability\n";
  for (const auto& e : dist.entries)
    out << e.influence.subset.to_string() << ',' << csv::format_number(e.probability) << '\n';
}

}  // namespace lcr
