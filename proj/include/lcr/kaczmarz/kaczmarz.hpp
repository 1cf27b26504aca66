#pragma once

// Randomized Kaczmarz for consistent systems X w = y, sampling rows by
// (approximate) leverage and projecting in a preconditioned basis.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "lcr/core/dataset.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/error.hpp"
#include "lcr/influence/sum_sampler.hpp"
#include "lcr/kaczmarz/label_oracle.hpp"
#include "lcr/rng.hpp"
#include "lcr/sketch/approx_leverage.hpp"
#include "lcr/sketch/operator.hpp"
#include "lcr/sketch/preconditioner.hpp"

namespace lcr {

struct KaczmarzRun {
  Eigen::VectorXd w;
  std::size_t labels_used = 0;  ///< distinct rows whose label was read
  std::size_t iterations = 0;
  /// ||v_t - v*||^2 for t = 0..K; only with a known solution (test mode).
  std::optional<std::vector<double>> error_trace;
  /// ||w_t - w*||^2 for t = 0..K; only with a known solution (test mode).
  std::optional<std::vector<double>> weight_error_trace;
};

/// Test-mode hooks. Outside tests neither is set: consistency is assumed and
/// checking it would need every label.
struct KaczmarzOptions {
  std::optional<Eigen::VectorXd> w_star;  ///< enables the error traces
  bool check_consistency = false;
};

/// One projective update v <- v - q (q^T v - s) / ||q||^2.
inline void kaczmarz_step(Eigen::VectorXd& v, const Eigen::VectorXd& q, double s) {
  v -= q * ((q.dot(v) - s) / q.squaredNorm());
}

/// Exact variant: rows drawn with p_i = ||u_i||^2 / d, updates on U v = y,
/// result w = V Sigma^{-1} v.
inline KaczmarzRun kaczmarz_exact(const ThinSvd& svd, const Eigen::VectorXd& y, std::size_t K, RngStream& rng,
                                  const KaczmarzOptions& opts = {}) {
  if (y.size() != svd.n()) fail(ErrorCode::DimensionMismatch, "labels do not match the factorization");
  if (K < 1) fail(ErrorCode::InvalidConfig, "need at least one iteration");
  if (opts.check_consistency) {
    const Eigen::VectorXd r = svd.U * (svd.U.transpose() * y) - y;
    if (r.norm() > 1e-8 * y.norm())
      fail(ErrorCode::InconsistentSystem, "residual norm " + std::to_string(r.norm()) + " exceeds 1e-8 ||y||");
  }
  const DiscreteCdf rows(svd.U.rowwise().squaredNorm());
  LabelOracle labels(y);
  const auto d = svd.d();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);

  KaczmarzRun run;
  Eigen::VectorXd v_star;
  auto to_w = [&](const Eigen::VectorXd& vv) -> Eigen::VectorXd {
    return svd.V * vv.cwiseQuotient(svd.sigma);
  };
  auto record = [&] {
    run.error_trace->push_back((v - v_star).squaredNorm());
    run.weight_error_trace->push_back((to_w(v) - *opts.w_star).squaredNorm());
  };
  if (opts.w_star) {
    v_star = svd.sigma.asDiagonal() * (svd.V.transpose() * *opts.w_star);
    run.error_trace.emplace();
    run.weight_error_trace.emplace();
    record();
  }
  for (std::size_t t = 0; t < K; ++t) {
    const std::size_t j = rows.sample(rng);
    kaczmarz_step(v, svd.U.row(Eigen::Index(j)).transpose(), labels.query(j));
    if (opts.w_star) record();
  }
  run.w = to_w(v);
  run.iterations = K;
  run.labels_used = labels.distinct_queries();
  return run;
}

/// Sketch sizes for the fast variant. Unset fields use 48 d ln d (capped at the
/// padded row count) for the column sketch and 72 ln(n+1) for the row sketch.
struct FastKaczmarzConfig {
  std::optional<std::size_t> column_sketch_dim;
  std::optional<std::size_t> row_sketch_dim;
};

/// Label-free preprocessing: SRHT sketch, pivoted-QR preconditioner, and
/// approximate leverage scores with their sampling CDF.
struct FastPreprocessing {
  SketchOperator column_sketch;
  Preconditioner precond;
  SketchOperator row_sketch;
  ApproxLeverage leverage;
  DiscreteCdf cdf;
};

inline FastPreprocessing prepare_fast_kaczmarz(const Eigen::MatrixXd& X, RngStream& rng,
                                               const FastKaczmarzConfig& cfg = {}) {
  const auto n = std::size_t(X.rows());
  const auto d = std::size_t(X.cols());
  const std::size_t r1 = cfg.column_sketch_dim.value_or(std::min(simplified_srht_dim(d), next_power_of_two(n)));
  const std::size_t r2 = cfg.row_sketch_dim.value_or(simplified_jlt_dim(n));
  RngStream column_rng = rng.substream(1);
  RngStream row_rng = rng.substream(2);
  SketchOperator column_sketch = make_srht(n, r1, column_rng);
  Preconditioner precond = build_preconditioner(X, column_sketch);
  SketchOperator row_sketch = make_dense_sign_jlt(d, r2, row_rng);
  ApproxLeverage lev = approx_leverage(X, precond, row_sketch);
  DiscreteCdf cdf(lev.ell_hat);
  return {std::move(column_sketch), std::move(precond), std::move(row_sketch), std::move(lev), std::move(cdf)};
}

/// Iterations of the fast variant on a prepared design. All K indices are drawn
/// up front and their preconditioned rows come from one multi-RHS solve.
inline KaczmarzRun run_fast_kaczmarz(const FastPreprocessing& prep, const Eigen::MatrixXd& X, LabelOracle& labels,
                                     std::size_t K, RngStream& rng, const KaczmarzOptions& opts = {}) {
  if (K < 1) fail(ErrorCode::InvalidConfig, "need at least one iteration");
  const auto d = X.cols();
  std::vector<std::size_t> picks(K);
  for (auto& j : picks) j = prep.cdf.sample(rng);
  Eigen::MatrixXd rows(Eigen::Index(K), d);
  for (std::size_t t = 0; t < K; ++t) rows.row(Eigen::Index(t)) = X.row(Eigen::Index(picks[t]));
  const Eigen::MatrixXd Q = prep.precond.right_apply_inverse(rows);

  KaczmarzRun run;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd v_star;
  auto record = [&] {
    run.error_trace->push_back((v - v_star).squaredNorm());
    run.weight_error_trace->push_back((prep.precond.apply_inverse(v) - *opts.w_star).squaredNorm());
  };
  if (opts.w_star) {
    v_star = prep.precond.apply(*opts.w_star);
    run.error_trace.emplace();
    run.weight_error_trace.emplace();
    record();
  }
  for (std::size_t t = 0; t < K; ++t) {
    kaczmarz_step(v, Q.row(Eigen::Index(t)).transpose(), labels.query(picks[t]));
    if (opts.w_star) record();
  }
  run.w = prep.precond.apply_inverse(v);
  run.iterations = K;
  run.labels_used = labels.distinct_queries();
  return run;
}

inline KaczmarzRun kaczmarz_fast(const Dataset& data, std::size_t K, RngStream& rng,
                                 const FastKaczmarzConfig& cfg = {}, const KaczmarzOptions& opts = {}) {
  const Eigen::VectorXd& y = data.y();
  if (opts.check_consistency) {
    const Eigen::VectorXd w = data.X().colPivHouseholderQr().solve(y);
    if ((data.X() * w - y).norm() > 1e-8 * y.norm())
      fail(ErrorCode::InconsistentSystem, "system is not consistent to 1e-8");
  }
  const FastPreprocessing prep = prepare_fast_kaczmarz(data.X(), rng, cfg);
  LabelOracle labels(y);
  return run_fast_kaczmarz(prep, data.X(), labels, K, rng, opts);
}

/// Classical Kaczmarz on X directly, rows drawn proportional to ||x_i||^2.
/// Baseline for the preconditioning comparison.
inline KaczmarzRun kaczmarz_row_norm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::size_t K,
                                     RngStream& rng, const KaczmarzOptions& opts = {}) {
  const DiscreteCdf rows(X.rowwise().squaredNorm());
  LabelOracle labels(y);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
  KaczmarzRun run;
  auto record = [&] {
    const double e = (w - *opts.w_star).squaredNorm();
    run.error_trace->push_back(e);
    run.weight_error_trace->push_back(e);
  };
  if (opts.w_star) {
    run.error_trace.emplace();
    run.weight_error_trace.emplace();
    record();
  }
  for (std::size_t t = 0; t < K; ++t) {
    const std::size_t j = rows.sample(rng);
    kaczmarz_step(w, X.row(Eigen::Index(j)).transpose(), labels.query(j));
    if (opts.w_star) record();
  }
  run.w = w;
  run.iterations = K;
  run.labels_used = labels.distinct_queries();
  return run;
}

enum class KaczmarzVariant { Exact, Fast };

/// Iterations (= labels) to reach expected error (d/n)||w*||^2:
/// exact  d ln(n kappa^2 / d);  fast  9 d ln(n kappa ||w*||^2 / d).
inline std::size_t labels_for_target(KaczmarzVariant variant, double n, double d, double kappa,
                                     double w_norm_sq = 1.0) {
  if (!(kappa >= 1.0)) fail(ErrorCode::InvalidConfig, "condition number must be >= 1");
  if (!(n > 0.0 && d > 0.0)) fail(ErrorCode::InvalidConfig, "n and d must be positive");
  const double t = variant == KaczmarzVariant::Exact ? d * std::log(n * kappa * kappa / d)
                                                     : 9.0 * d * std::log(n * kappa * w_norm_sq / d);
  const double c = std::ceil(t - 1e-12 * std::max(1.0, std::abs(t)));
  return c < 1.0 ? 1 : std::size_t(c);
}

inline std::size_t labels_for_target(KaczmarzVariant variant, const ThinSvd& svd, double w_norm_sq = 1.0) {
  return labels_for_target(variant, double(svd.n()), double(svd.d()), svd.kappa(), w_norm_sq);
}

}  // namespace lcr
