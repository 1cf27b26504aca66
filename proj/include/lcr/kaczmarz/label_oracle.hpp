#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "lcr/error.hpp"

namespace lcr {

/// Reveals labels one at a time and counts how many distinct rows were seen.
class LabelOracle {
 public:
  explicit LabelOracle(const Eigen::VectorXd& y) : y_(&y), seen_(std::size_t(y.size()), false) {}

  double query(std::size_t i) {
    if (i >= seen_.size()) fail(ErrorCode::InvalidDimension, "label index " + std::to_string(i) + " out of range");
    ++total_;
    if (!seen_[i]) {
      seen_[i] = true;
      ++distinct_;
    }
    return (*y_)(Eigen::Index(i));
  }

  std::size_t distinct_queries() const noexcept { return distinct_; }
  std::size_t total_queries() const noexcept { return total_; }

 private:
  const Eigen::VectorXd* y_;
  std::vector<bool> seen_;
  std::size_t distinct_ = 0;
  std::size_t total_ = 0;
};

}  // namespace lcr
