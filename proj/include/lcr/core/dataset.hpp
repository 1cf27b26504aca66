#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <utility>

#include "lcr/error.hpp"

namespace lcr {

/// Design matrix X (n x d) with optional labels y.
///
/// Construction enforces n > d >= 1, matching label length, and that no row of X
/// is identically zero. Full column rank is checked by thin_svd, which needs the
/// singular values anyway.
class Dataset {
 public:
  explicit Dataset(Eigen::MatrixXd X, std::optional<Eigen::VectorXd> y = std::nullopt)
      : X_(std::move(X)), y_(std::move(y)) {
    if (X_.cols() < 1 || X_.rows() <= X_.cols())
      fail(ErrorCode::InvalidDimension, "need n > d >= 1, got n=" + std::to_string(X_.rows()) +
                                            ", d=" + std::to_string(X_.cols()));
    if (y_ && y_->size() != X_.rows())
      fail(ErrorCode::DimensionMismatch, "labels have length " + std::to_string(y_->size()) + ", expected " +
                                             std::to_string(X_.rows()));
    for (Eigen::Index i = 0; i < X_.rows(); ++i)
      if ((X_.row(i).array() == 0.0).all()) fail(ErrorCode::ZeroRow, "row " + std::to_string(i) + " is zero");
  }

  Dataset(Eigen::MatrixXd X, Eigen::VectorXd y) : Dataset(std::move(X), std::optional<Eigen::VectorXd>(std::move(y))) {}

  Eigen::Index n() const noexcept { return X_.rows(); }
  Eigen::Index d() const noexcept { return X_.cols(); }

  const Eigen::MatrixXd& X() const noexcept { return X_; }

  bool has_labels() const noexcept { return y_.has_value(); }

  const Eigen::VectorXd& y() const {
    if (!y_) fail(ErrorCode::MissingLabels, "dataset has no labels");
    return *y_;
  }

  Dataset with_labels(Eigen::VectorXd y) const { return Dataset(X_, std::move(y)); }

 private:
  Eigen::MatrixXd X_;
  std::optional<Eigen::VectorXd> y_;
};

}  // namespace lcr
