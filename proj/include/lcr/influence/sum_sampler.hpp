#pragma once

// Exact sampling of k-subsets with probability proportional to sum_{i in A} f_i:
// draw one row by f, then k-1 of the others uniformly without replacement.

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "lcr/core/row_subset.hpp"
#include "lcr/error.hpp"
#include "lcr/influence/combinatorics.hpp"
#include "lcr/rng.hpp"

namespace lcr {

/// Inverse-CDF sampler over a fixed nonnegative weight vector.
class DiscreteCdf {
 public:
  explicit DiscreteCdf(const Eigen::VectorXd& weights) : cumulative_(std::size_t(weights.size())) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (!(weights(i) >= 0.0)) fail(ErrorCode::NonpositiveWeight, "negative or NaN weight at " + std::to_string(i));
      acc += weights(i);
      cumulative_[std::size_t(i)] = acc;
    }
    if (!(acc > 0.0)) fail(ErrorCode::DegenerateDistribution, "weights sum to zero");
  }

  std::size_t size() const noexcept { return cumulative_.size(); }
  double total() const noexcept { return cumulative_.back(); }

  std::size_t sample(RngStream& rng) const {
    const double target = rng.uniform() * total();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
    // target < total, so `it` is valid except for rounding at the very top;
    // zero-weight rows share a cumulative value and are never the upper bound.
    if (it == cumulative_.end()) it = std::prev(it);
    return std::size_t(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

class SumOverRowsSampler {
 public:
  explicit SumOverRowsSampler(Eigen::VectorXd f) : f_(validated(std::move(f))), cdf_(f_) {}

  std::size_t n() const noexcept { return cdf_.size(); }
  double total() const noexcept { return cdf_.total(); }

  RowSubset sample(std::size_t k, RngStream& rng) const {
    const std::size_t n = this->n();
    if (k < 1 || k > n) fail(ErrorCode::InvalidK, "k=" + std::to_string(k) + " not in [1, " + std::to_string(n) + "]");
    std::vector<std::size_t> chosen;
    chosen.reserve(k);
    // Sparse Fisher-Yates over the virtual array 0..n-1: only displaced slots
    // are stored. Slot 0 takes the f-distributed row, the rest are uniform
    // draws from the n-1 remaining rows.
    std::vector<std::pair<std::size_t, std::size_t>> displaced;
    auto slot = [&](std::size_t i) {
      for (const auto& [pos, val] : displaced)
        if (pos == i) return val;
      return i;
    };
    auto set_slot = [&](std::size_t i, std::size_t v) {
      for (auto& [pos, val] : displaced)
        if (pos == i) {
          val = v;
          return;
        }
      displaced.emplace_back(i, v);
    };
    const std::size_t first = cdf_.sample(rng);
    chosen.push_back(first);
    set_slot(first, slot(0));
    for (std::size_t t = 1; t < k; ++t) {
      const std::size_t j = t + std::size_t(rng.below(n - t));
      const std::size_t picked = slot(j);
      set_slot(j, slot(t));
      chosen.push_back(picked);
    }
    return RowSubset(std::move(chosen), n);
  }

  /// Exact probability of drawing A: sum_{i in A} f_i / (C(n-1, k-1) sum_j f_j).
  double probability(const RowSubset& A) const {
    double mass = 0.0;
    for (auto i : A.indices()) mass += weight(i);
    return mass / (binomial(n() - 1, A.k() - 1) * total());
  }

  double weight(std::size_t i) const { return f_(Eigen::Index(i)); }

 private:
  static Eigen::VectorXd validated(Eigen::VectorXd f) {
    if (f.size() < 1) fail(ErrorCode::InvalidDimension, "empty weight vector");
    for (Eigen::Index i = 0; i < f.size(); ++i)
      if (!(f(i) > 0.0)) fail(ErrorCode::NonpositiveWeight, "f[" + std::to_string(i) + "] must be positive");
    return f;
  }

  Eigen::VectorXd f_;
  DiscreteCdf cdf_;
};

}  // namespace lcr

namespace lcr {

inline RowSubset sample_sum_over_rows(const Eigen::VectorXd& f, std::size_t k, RngStream& rng) {
  return SumOverRowsSampler(f).sample(k, rng);
}

}  // namespace lcr
