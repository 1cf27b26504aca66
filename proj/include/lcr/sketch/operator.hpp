#pragma once

// Oblivious sketches acting from the left on n_in-row matrices: identity,
// dense random signs, and the subsampled randomized Hadamard transform.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lcr/error.hpp"
#include "lcr/rng.hpp"
#include "lcr/sketch/fwht.hpp"

namespace lcr {

enum class SketchKind { Identity, DenseSign, Srht };

inline std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::Identity: return "identity";
    case SketchKind::DenseSign: return "sign";
    case SketchKind::Srht: return "srht";
  }
  return "unknown";
}

struct SketchOperator {
  SketchKind kind = SketchKind::Identity;
  std::size_t r = 0;     ///< output (embedding) dimension
  std::size_t n_in = 0;  ///< input row count
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  // Srht only.
  std::size_t n_pad = 0;
  std::vector<double> signs;         ///< n_pad entries in {-1, +1}
  std::vector<std::size_t> coords;   ///< r distinct sampled coordinates, ascending

  // DenseSign only: r x n_in entries +-1/sqrt(r).
  Eigen::MatrixXd dense;
};

namespace detail {

inline std::size_t ceil_tol(double x) {
  // Absorb rounding in closed-form constants such as 12 / (1/4 - 1/12) = 72.
  return std::size_t(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

}  // namespace detail

/// Embedding dimension for a dense sign JLT of n points:
/// ceil((8 + 4 beta) / (eps^2 - 2 eps^3 / 3) * ln(n + 1)).
inline std::size_t jlt_dim(std::size_t n, double eps, double beta) {
  if (!(eps > 0.0 && eps < 1.0) || !(beta > 0.0)) fail(ErrorCode::InvalidConfig, "jlt_dim needs 0 < eps < 1, beta > 0");
  return detail::ceil_tol((8.0 + 4.0 * beta) / (eps * eps - 2.0 * eps * eps * eps / 3.0) * std::log(double(n) + 1.0));
}

/// Embedding dimension for an SRHT eps-JLT of an orthonormal n x d basis with
/// failure probability gamma:
/// ceil(12/(5 eps^2) (sqrt(d) + sqrt(8 ln(3n/gamma)))^2 ln d), at least d.
inline std::size_t srht_dim(std::size_t n, std::size_t d, double eps, double gamma) {
  if (!(eps > 0.0 && eps <= 0.5) || !(gamma > 0.0 && gamma < 1.0) || d < 1)
    fail(ErrorCode::InvalidConfig, "srht_dim needs 0 < eps <= 1/2, 0 < gamma < 1, d >= 1");
  const double root = std::sqrt(double(d)) + std::sqrt(8.0 * std::log(3.0 * double(n) / gamma));
  return std::max(d, detail::ceil_tol(12.0 / (5.0 * eps * eps) * root * root * std::log(double(d))));
}

/// Simplified column-space sketch size 48 d ln d (at least d).
inline std::size_t simplified_srht_dim(std::size_t d) {
  return std::max(d, detail::ceil_tol(48.0 * double(d) * std::log(double(d))));
}

/// Simplified row-norm sketch size 72 ln(n + 1).
inline std::size_t simplified_jlt_dim(std::size_t n) { return detail::ceil_tol(72.0 * std::log(double(n) + 1.0)); }

inline SketchOperator make_identity_sketch(std::size_t n_in) {
  if (n_in < 1) fail(ErrorCode::InvalidDimension, "identity sketch needs n_in >= 1");
  SketchOperator op;
  op.kind = SketchKind::Identity;
  op.r = op.n_in = n_in;
  return op;
}

inline SketchOperator make_dense_sign_jlt(std::size_t n_in, std::size_t r, RngStream& rng) {
  if (n_in < 1 || r < 1) fail(ErrorCode::InvalidDimension, "dense sign sketch needs n_in, r >= 1");
  SketchOperator op;
  op.kind = SketchKind::DenseSign;
  op.r = r;
  op.n_in = n_in;
  op.seed = rng.seed();
  op.stream_id = rng.stream_id();
  const double s = 1.0 / std::sqrt(double(r));
  op.dense.resize(Eigen::Index(r), Eigen::Index(n_in));
  // Column-major fill so the draw order is fixed.
  for (Eigen::Index j = 0; j < op.dense.cols(); ++j)
    for (Eigen::Index i = 0; i < op.dense.rows(); ++i) op.dense(i, j) = rng.coin() ? s : -s;
  return op;
}

inline SketchOperator make_srht(std::size_t n_in, std::size_t r, RngStream& rng) {
  SketchOperator op;
  op.kind = SketchKind::Srht;
  op.n_in = n_in;
  op.r = r;
  op.n_pad = next_power_of_two(n_in);
  if (n_in < 1 || r < 1 || r > op.n_pad)
    fail(ErrorCode::InvalidDimension, "SRHT needs 1 <= r <= n_pad (r=" + std::to_string(r) +
                                          ", n_pad=" + std::to_string(op.n_pad) + ")");
  op.seed = rng.seed();
  op.stream_id = rng.stream_id();
  op.signs.resize(op.n_pad);
  for (auto& s : op.signs) s = rng.coin() ? 1.0 : -1.0;
  // Partial Fisher-Yates: r coordinates without replacement.
  std::vector<std::size_t> pool(op.n_pad);
  for (std::size_t i = 0; i < op.n_pad; ++i) pool[i] = i;
  for (std::size_t t = 0; t < r; ++t) std::swap(pool[t], pool[t + std::size_t(rng.below(op.n_pad - t))]);
  op.coords.assign(pool.begin(), pool.begin() + std::ptrdiff_t(r));
  std::sort(op.coords.begin(), op.coords.end());
  return op;
}

/// Pi * M for an n_in x m matrix M; returns r x m.
inline Eigen::MatrixXd apply_sketch(const SketchOperator& op, const Eigen::MatrixXd& M) {
  if (std::size_t(M.rows()) != op.n_in)
    fail(ErrorCode::DimensionMismatch, "sketch expects " + std::to_string(op.n_in) + " rows, got " +
                                           std::to_string(M.rows()));
  switch (op.kind) {
    case SketchKind::Identity:
      return M;
    case SketchKind::DenseSign:
      return op.dense * M;
    case SketchKind::Srht: {
      Eigen::MatrixXd out(Eigen::Index(op.r), M.cols());
      std::vector<double> buf(op.n_pad);
      const double scale = std::sqrt(double(op.n_pad) / double(op.r));
      for (Eigen::Index c = 0; c < M.cols(); ++c) {
        std::fill(buf.begin(), buf.end(), 0.0);
        for (std::size_t i = 0; i < op.n_in; ++i) buf[i] = op.signs[i] * M(Eigen::Index(i), c);
        fwht(std::span<double>(buf));
        for (std::size_t t = 0; t < op.r; ++t) out(Eigen::Index(t), c) = scale * buf[op.coords[t]];
      }
      return out;
    }
  }
  return {};
}

}  // namespace lcr
