#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <span>
#include <vector>

#include "lcr/core/leverage.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/sketch/approx_leverage.hpp"
#include "lcr/sketch/embedding.hpp"
#include "lcr/sketch/fwht.hpp"
#include "lcr/sketch/operator.hpp"
#include "lcr/sketch/preconditioner.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using testing_support::code_of;
using testing_support::gaussian;

namespace {

Eigen::MatrixXd orthonormal(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  return oracle::gram_schmidt(gaussian(n, d, seed));
}

/// Singular values of M, ascending.
Eigen::VectorXd ascending_sigma(const Eigen::MatrixXd& M) {
  Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  return s.reverse();
}

}  // namespace

TEST(Fwht, UnitVector) {
  std::vector<double> v{1, 0, 0, 0};
  lcr::fwht(std::span<double>(v));
  for (double x : v) EXPECT_NEAR(x, 0.5, 1e-15);
}

TEST(Fwht, MatchesDenseHadamard) {
  const std::size_t n = 16;
  std::vector<double> v(n);
  lcr::RngStream rng(1);
  for (auto& x : v) x = rng.normal();
  std::vector<double> expected(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      expected[i] += (std::popcount(i & j) % 2 ? -1.0 : 1.0) * v[j] / std::sqrt(double(n));
  lcr::fwht(std::span<double>(v));
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(v[i], expected[i], 1e-12);
}

TEST(Fwht, SelfInverse) {
  for (std::size_t n : {1u, 2u, 64u, 1024u}) {
    std::vector<double> v(n);
    lcr::RngStream rng(n);
    for (auto& x : v) x = rng.normal();
    const std::vector<double> orig = v;
    lcr::fwht(std::span<double>(v));
    lcr::fwht(std::span<double>(v));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(v[i], orig[i], 1e-12);
  }
}

TEST(Fwht, RejectsNonPowerOfTwo) {
  std::vector<double> v(6, 1.0);
  EXPECT_EQ(code_of([&] { lcr::fwht(std::span<double>(v)); }), lcr::ErrorCode::InvalidDimension);
  EXPECT_EQ(lcr::next_power_of_two(6), 8u);
  EXPECT_EQ(lcr::next_power_of_two(8), 8u);
  EXPECT_EQ(lcr::next_power_of_two(1), 1u);
}

TEST(Dimensions, JltSimplification) {
  for (std::size_t n : {10u, 100u, 512u, 2048u, 100000u}) {
    EXPECT_EQ(lcr::jlt_dim(n, 0.5, 1.0), std::size_t(std::ceil(72 * std::log(double(n) + 1) - 1e-9)));
    EXPECT_EQ(lcr::jlt_dim(n, 0.5, 1.0), lcr::simplified_jlt_dim(n));
  }
}

TEST(Dimensions, SrhtFormula) {
  for (std::size_t n : {64u, 512u, 4096u}) {
    for (std::size_t d : {2u, 8u, 20u}) {
      const double root = std::sqrt(double(d)) + std::sqrt(8 * std::log(3.0 * double(n) / 0.05));
      const double raw = 12.0 / (5 * 0.25) * root * root * std::log(double(d));
      EXPECT_EQ(lcr::srht_dim(n, d, 0.5, 0.05), std::max<std::size_t>(d, std::size_t(std::ceil(raw - 1e-9 * raw))));
    }
  }
  EXPECT_EQ(lcr::simplified_srht_dim(8), std::size_t(std::ceil(48 * 8 * std::log(8.0))));
  EXPECT_EQ(lcr::simplified_srht_dim(1), 1u);
  EXPECT_EQ(code_of([] { lcr::srht_dim(10, 2, 0.7, 0.1); }), lcr::ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { lcr::jlt_dim(10, 1.0, 1.0); }), lcr::ErrorCode::InvalidConfig);
}

TEST(SketchOperator, DenseSignEntries) {
  lcr::RngStream rng(2);
  const auto op = lcr::make_dense_sign_jlt(30, 9, rng);
  EXPECT_EQ(op.dense.rows(), 9);
  EXPECT_EQ(op.dense.cols(), 30);
  for (Eigen::Index i = 0; i < op.dense.size(); ++i) EXPECT_NEAR(std::abs(op.dense(i)), 1.0 / 3.0, 1e-15);
  EXPECT_GT((op.dense.array() > 0).count(), 0);
  EXPECT_GT((op.dense.array() < 0).count(), 0);
}

TEST(SketchOperator, SrhtPaddingAndCoordinates) {
  lcr::RngStream rng(3);
  const auto op = lcr::make_srht(6, 8, rng);
  EXPECT_EQ(op.n_pad, 8u);
  EXPECT_EQ(op.coords, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7}));
  lcr::RngStream rng2(4);
  const auto sub = lcr::make_srht(100, 40, rng2);
  EXPECT_EQ(sub.n_pad, 128u);
  EXPECT_EQ(sub.coords.size(), 40u);
  EXPECT_TRUE(std::adjacent_find(sub.coords.begin(), sub.coords.end()) == sub.coords.end());
  EXPECT_LT(sub.coords.back(), 128u);
  EXPECT_EQ(code_of([&] { lcr::make_srht(6, 9, rng); }), lcr::ErrorCode::InvalidDimension);
  EXPECT_EQ(code_of([&] { lcr::make_srht(6, 0, rng); }), lcr::ErrorCode::InvalidDimension);
}

TEST(SketchOperator, Deterministic) {
  lcr::RngStream a(5, 9), b(5, 9);
  const auto s1 = lcr::make_srht(50, 20, a);
  const auto s2 = lcr::make_srht(50, 20, b);
  EXPECT_EQ(s1.signs, s2.signs);
  EXPECT_EQ(s1.coords, s2.coords);
}

TEST(SketchOperator, FullSrhtIsOrthogonal) {
  lcr::RngStream rng(6);
  auto op = lcr::make_srht(64, 64, rng);
  const Eigen::MatrixXd U = orthonormal(64, 4, 7);
  EXPECT_LE(lcr::jlt_defect(op, U), 1e-10);
  std::fill(op.signs.begin(), op.signs.end(), 1.0);
  EXPECT_LE(lcr::jlt_defect(op, U), 1e-10);
}

TEST(SketchOperator, ZeroOperatorHasUnitDefect) {
  lcr::RngStream rng(8);
  auto op = lcr::make_dense_sign_jlt(20, 5, rng);
  op.dense.setZero();
  EXPECT_EQ(lcr::jlt_defect(op, orthonormal(20, 3, 9)), 1.0);
}

TEST(SketchOperator, ColumnwiseConsistency) {
  lcr::RngStream rng(10);
  const auto op = lcr::make_srht(37, 16, rng);
  const Eigen::MatrixXd M = gaussian(37, 5, 11);
  const Eigen::MatrixXd whole = lcr::apply_sketch(op, M);
  for (Eigen::Index c = 0; c < 5; ++c) {
    const Eigen::MatrixXd col = lcr::apply_sketch(op, M.col(c));
    for (Eigen::Index i = 0; i < whole.rows(); ++i) EXPECT_EQ(whole(i, c), col(i, 0));
  }
  // Linearity.
  const Eigen::MatrixXd N = gaussian(37, 5, 12);
  EXPECT_LE((lcr::apply_sketch(op, M + 2 * N) - whole - 2 * lcr::apply_sketch(op, N)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SketchOperator, SrhtMatchesExplicitMatrix) {
  lcr::RngStream rng(13);
  const auto op = lcr::make_srht(6, 5, rng);
  Eigen::MatrixXd S(5, 6);
  const double scale = std::sqrt(8.0 / 5.0) / std::sqrt(8.0);
  for (Eigen::Index t = 0; t < 5; ++t)
    for (Eigen::Index j = 0; j < 6; ++j)
      S(t, j) = scale * op.signs[std::size_t(j)] * (std::popcount(op.coords[std::size_t(t)] & std::size_t(j)) % 2 ? -1.0 : 1.0);
  const Eigen::MatrixXd M = gaussian(6, 3, 14);
  EXPECT_LE((lcr::apply_sketch(op, M) - S * M).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SketchOperator, DimensionMismatch) {
  lcr::RngStream rng(15);
  const auto op = lcr::make_srht(10, 4, rng);
  EXPECT_EQ(code_of([&] { lcr::apply_sketch(op, Eigen::MatrixXd::Ones(9, 2)); }), lcr::ErrorCode::DimensionMismatch);
}

TEST(SketchOperator, SrhtDefectAtFormulaDimension) {
  // The formula dimension for n = 256, d = 4 exceeds n_pad, so it is clamped; the
  // clamped sketch is orthogonal. A quarter-size sketch is checked as well.
  const std::size_t n = 256, d = 4;
  EXPECT_GT(lcr::srht_dim(n, d, 0.5, 0.05), n);
  int clamped_ok = 0, quarter_ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::MatrixXd U = orthonormal(Eigen::Index(n), Eigen::Index(d), 100 + seed);
    lcr::RngStream rng(seed, 16);
    clamped_ok += lcr::jlt_defect(lcr::make_srht(n, std::min(n, lcr::srht_dim(n, d, 0.5, 0.05)), rng), U) <= 0.5;
    quarter_ok += lcr::jlt_defect(lcr::make_srht(n, n / 4, rng), U) <= 0.5;
  }
  EXPECT_EQ(clamped_ok, 20);
  EXPECT_GE(quarter_ok, 19);
}

TEST(SketchOperator, DenseSignDefectFrequency) {
  const std::size_t n = 200, d = 3;
  const std::size_t r = lcr::jlt_dim(n, 0.5, 1.0);
  int ok = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    lcr::RngStream rng(seed, 17);
    ok += lcr::jlt_defect(lcr::make_dense_sign_jlt(n, r, rng), orthonormal(Eigen::Index(n), Eigen::Index(d), seed)) <= 0.5;
  }
  EXPECT_GE(ok, int(std::ceil(100 * (1 - 1.0 / double(n)))));
}

TEST(Embedding, PropertiesHoldForMeasuredDefect) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::MatrixXd U = orthonormal(128, 4, seed);
    lcr::RngStream rng(seed, 18);
    const auto op = seed % 2 ? lcr::make_srht(128, 48, rng) : lcr::make_dense_sign_jlt(128, 60, rng);
    const auto props = lcr::embedding_properties(lcr::apply_sketch(op, U));
    if (props.defect < 1.0) {
      EXPECT_TRUE(props.holds()) << "seed " << seed << " defect " << props.defect;
    }
  }
}

TEST(Embedding, IdentityIsPerfect) {
  const auto props = lcr::embedding_properties(orthonormal(30, 3, 19));
  EXPECT_LE(props.defect, 1e-12);
  EXPECT_LE(props.pinv_transpose_gap, 1e-10);
  EXPECT_TRUE(props.holds());
}

TEST(Embedding, RankLossFails) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(5, 2);
  B(0, 0) = 1;
  const auto props = lcr::embedding_properties(B);
  EXPECT_EQ(props.rank, 1);
  EXPECT_FALSE(props.holds());
}

TEST(Embedding, PseudoInverseFactorization) {
  const Eigen::MatrixXd X = gaussian(64, 3, 20);
  const lcr::ThinSvd svd = lcr::thin_svd(X);
  lcr::RngStream rng(21);
  const auto op = lcr::make_srht(64, 24, rng);
  EXPECT_LE(lcr::pinv_factorization_residual(lcr::apply_sketch(op, X), lcr::apply_sketch(op, svd.U), svd.sigma, svd.V),
            1e-10);
}

TEST(Preconditioner, IdentitySketchWhitens) {
  const Eigen::MatrixXd X = gaussian(50, 4, 22);
  const auto pre = lcr::build_preconditioner(X, lcr::make_identity_sketch(50));
  const Eigen::VectorXd s = ascending_sigma(pre.right_apply_inverse(X));
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(s(i), 1.0, 1e-10);
}

TEST(Preconditioner, SingularValueInversionIdentity) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const Eigen::MatrixXd X = testing_support::design(lcr::lab::DesignKind::Gaussian, 128, 4, seed, 1e3);
    const lcr::ThinSvd svd = lcr::thin_svd(X);
    lcr::RngStream rng(seed, 23);
    const auto op = seed % 3 == 0   ? lcr::make_identity_sketch(128)
                    : seed % 3 == 1 ? lcr::make_srht(128, 32, rng)
                                    : lcr::make_dense_sign_jlt(128, 32, rng);
    const auto pre = lcr::build_preconditioner(X, op);
    // Dense inverse on the test side, independent of the triangular solves.
    const Eigen::VectorXd lhs = ascending_sigma(X * pre.R().inverse());
    const Eigen::VectorXd pu = ascending_sigma(lcr::apply_sketch(op, svd.U));
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(lhs(i) * pu(3 - i), 1.0, 1e-8) << to_string(op.kind);
    EXPECT_NEAR((lhs(3) / lhs(0)) / (pu(3) / pu(0)), 1.0, 1e-8);
  }
}

TEST(Preconditioner, FactorMatchesSketchGram) {
  const Eigen::MatrixXd X = gaussian(64, 5, 24);
  lcr::RngStream rng(25);
  const auto op = lcr::make_srht(64, 32, rng);
  const auto pre = lcr::build_preconditioner(X, op);
  const Eigen::MatrixXd SX = lcr::apply_sketch(op, X);
  const Eigen::MatrixXd R = pre.R();
  EXPECT_LE((R.transpose() * R - SX.transpose() * SX).cwiseAbs().maxCoeff(), 1e-9 * SX.squaredNorm());
  EXPECT_LE((pre.T() * pre.P() - R).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((pre.T().triangularView<Eigen::StrictlyLower>().toDenseMatrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Preconditioner, ApplyAndInverseRoundTrip) {
  const Eigen::MatrixXd X = gaussian(40, 6, 26);
  lcr::RngStream rng(27);
  const auto pre = lcr::build_preconditioner(X, lcr::make_dense_sign_jlt(40, 20, rng));
  const Eigen::VectorXd w = testing_support::gaussian_vec(6, 28);
  EXPECT_LE((pre.apply_inverse(pre.apply(w)) - w).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((pre.apply(w) - pre.R() * w).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((pre.right_apply_inverse(X) - X * pre.R().inverse()).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_EQ(code_of([&] { pre.right_apply_inverse(Eigen::MatrixXd::Ones(3, 5)); }), lcr::ErrorCode::DimensionMismatch);
}

TEST(Preconditioner, RankDeficientSketch) {
  const Eigen::MatrixXd X = gaussian(40, 6, 29);
  lcr::RngStream rng(30);
  EXPECT_EQ(code_of([&] { lcr::build_preconditioner(X, lcr::make_srht(40, 4, rng)); }),
            lcr::ErrorCode::SketchRankDeficient);
  auto op = lcr::make_dense_sign_jlt(40, 10, rng);
  op.dense.bottomRows(7).setZero();
  EXPECT_EQ(code_of([&] { lcr::build_preconditioner(X, op); }), lcr::ErrorCode::SketchRankDeficient);
}

TEST(ApproxLeverage, ExactSketchesRecoverLeverage) {
  const Eigen::MatrixXd X = testing_support::design(lcr::lab::DesignKind::Coherent, 60, 4, 31);
  const auto pre = lcr::build_preconditioner(X, lcr::make_identity_sketch(60));
  const auto approx = lcr::approx_leverage(X, pre, lcr::make_identity_sketch(4));
  EXPECT_LE((approx.ell_hat - oracle::hat_diagonal(X)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ApproxLeverage, RowSketchFactor) {
  const std::size_t n = 512, d = 8;
  const Eigen::MatrixXd X = testing_support::design(lcr::lab::DesignKind::Coherent, n, d, 32);
  const Eigen::VectorXd ell = oracle::hat_diagonal(X);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    lcr::RngStream rng(seed, 33);
    const auto op1 = lcr::make_srht(n, 128, rng);
    const auto pre = lcr::build_preconditioner(X, op1);
    const auto op2 = lcr::make_dense_sign_jlt(d, lcr::simplified_jlt_dim(n), rng);
    const Eigen::VectorXd exact = lcr::preconditioned_row_norms(X, pre);
    const Eigen::VectorXd hat = lcr::approx_leverage(X, pre, op2).ell_hat;
    const Eigen::ArrayXd ratio = hat.array() / exact.array();
    EXPECT_GE(ratio.minCoeff(), 0.5) << "seed " << seed;
    EXPECT_LE(ratio.maxCoeff(), 1.5) << "seed " << seed;
    if (lcr::jlt_defect(op1, lcr::thin_svd(X).U) <= 0.5) {
      const Eigen::ArrayXd total = hat.array() / ell.array();
      EXPECT_GE(total.minCoeff(), 0.25);
      EXPECT_LE(total.maxCoeff(), 3.0);
    }
    EXPECT_GT(hat.minCoeff(), 0.0);
  }
}

TEST(ApproxLeverage, DimensionMismatch) {
  const Eigen::MatrixXd X = gaussian(20, 3, 34);
  const auto pre = lcr::build_preconditioner(X, lcr::make_identity_sketch(20));
  EXPECT_EQ(code_of([&] { lcr::approx_leverage(X, pre, lcr::make_identity_sketch(4)); }),
            lcr::ErrorCode::DimensionMismatch);
}
