#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "lcr/error.hpp"

namespace lcr {

/// A k-subset of row indices of an n-row design, stored sorted ascending.
class RowSubset {
 public:
  RowSubset(std::vector<std::size_t> indices, std::size_t n) : indices_(std::move(indices)), n_(n) {
    std::sort(indices_.begin(), indices_.end());
    if (indices_.empty() || indices_.size() > n_)
      fail(ErrorCode::InvalidK, "subset size " + std::to_string(indices_.size()) + " not in [1, " +
                                    std::to_string(n_) + "]");
    if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
      fail(ErrorCode::InvalidK, "subset indices must be distinct");
    if (indices_.back() >= n_)
      fail(ErrorCode::InvalidDimension, "row index " + std::to_string(indices_.back()) + " out of range");
  }

  std::size_t k() const noexcept { return indices_.size(); }
  std::size_t n() const noexcept { return n_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }

  bool contains(std::size_t i) const { return std::binary_search(indices_.begin(), indices_.end(), i); }

  /// Rows of M selected by the subset, in subset order.
  template <class Derived>
  Eigen::MatrixXd gather(const Eigen::MatrixBase<Derived>& M) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(k()), M.cols());
    for (std::size_t r = 0; r < k(); ++r) out.row(Eigen::Index(r)) = M.row(Eigen::Index(indices_[r]));
    return out;
  }

  Eigen::VectorXd gather(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(k()));
    for (std::size_t r = 0; r < k(); ++r) out(Eigen::Index(r)) = v(Eigen::Index(indices_[r]));
    return out;
  }

  /// Semicolon-joined indices, as used in enumeration exports.
  std::string to_string() const {
    std::string s;
    for (std::size_t r = 0; r < k(); ++r) {
      if (r) s += ';';
      s += std::to_string(indices_[r]);
    }
    return s;
  }

  friend bool operator==(const RowSubset& a, const RowSubset& b) {
    return a.n_ == b.n_ && a.indices_ == b.indices_;
  }
  friend bool operator<(const RowSubset& a, const RowSubset& b) { return a.indices_ < b.indices_; }

 private:
  std::vector<std::size_t> indices_;
  std::size_t n_;
};

}  // namespace lcr
