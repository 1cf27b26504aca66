#pragma once

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cstdint>

#include "lcr/error.hpp"
#include "lcr/lab/config.hpp"
#include "lcr/lab/generate.hpp"
#include "lcr/rng.hpp"

namespace testing_support {

/// Code of the lcr::Error thrown by `fn`; records a failure when nothing is thrown.
template <class Fn>
lcr::ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const lcr::Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected lcr::Error";
  return lcr::ErrorCode::ParseError;
}

inline Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  lcr::RngStream rng(seed);
  return lcr::lab::gaussian_matrix(n, d, rng);
}

inline Eigen::VectorXd gaussian_vec(Eigen::Index n, std::uint64_t seed) { return gaussian(n, 1, seed); }

inline Eigen::MatrixXd design(lcr::lab::DesignKind kind, std::size_t n, std::size_t d, std::uint64_t seed,
                              double kappa = 1.0) {
  lcr::lab::ExperimentConfig cfg;
  cfg.n = n;
  cfg.d = d;
  cfg.design = kind;
  cfg.seed = seed;
  cfg.kappa = kappa;
  return lcr::lab::generate_design(cfg);
}

}  // namespace testing_support
