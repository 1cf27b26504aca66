#pragma once

// Experiment drivers. Each builds an instance from an ExperimentConfig, measures
// the guaranteed quantity, evaluates its bound at (n, d, k), and records
// pass/fail per criterion.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "lcr/core/least_squares.hpp"
#include "lcr/csv.hpp"
#include "lcr/core/leverage.hpp"
#include "lcr/core/row_subset.hpp"
#include "lcr/core/svd.hpp"
#include "lcr/error.hpp"
#include "lcr/influence/combinatorics.hpp"
#include "lcr/influence/enumerate.hpp"
#include "lcr/influence/rejection.hpp"
#include "lcr/influence/single_row.hpp"
#include "lcr/kaczmarz/kaczmarz.hpp"
#include "lcr/lab/config.hpp"
#include "lcr/lab/generate.hpp"
#include "lcr/lab/parallel.hpp"
#include "lcr/lab/report.hpp"
#include "lcr/rng.hpp"
#include "lcr/sketch/approx_leverage.hpp"
#include "lcr/sketch/embedding.hpp"
#include "lcr/sketch/operator.hpp"
#include "lcr/sketch/preconditioner.hpp"

namespace lcr::lab {

inline constexpr double kExactTolerance = 1e-10;
inline constexpr double kIdentityTolerance = 1e-8;
inline constexpr double kTvThreshold = 0.01;
inline constexpr std::size_t kContractionSteps = 500;
inline constexpr std::size_t kRateTrials = 500;
inline constexpr std::size_t kSamplerChunk = 1000;

// Stream-id bases; trial t of an experiment uses base + t.
inline constexpr std::uint64_t kStreamKPoints = 0x10000;
inline constexpr std::uint64_t kStreamSampler = 0x20000;
inline constexpr std::uint64_t kStreamSketch = 0x30000;
inline constexpr std::uint64_t kStreamExact = 0x40000;
inline constexpr std::uint64_t kStreamContraction = 0x50000;
inline constexpr std::uint64_t kStreamFast = 0x60000;
inline constexpr std::uint64_t kStreamBaseline = 0x70000;
inline constexpr std::uint64_t kStreamRate = 0x80000;

struct MeanSe {
  double mean = 0;
  double se = 0;
};

inline MeanSe mean_se(const std::vector<double>& x) {
  MeanSe r;
  if (x.empty()) return r;
  double s = 0;
  for (double v : x) s += v;
  r.mean = s / double(x.size());
  if (x.size() < 2) return r;
  double ss = 0;
  for (double v : x) ss += (v - r.mean) * (v - r.mean);
  r.se = std::sqrt(ss / double(x.size() - 1) / double(x.size()));
  return r;
}

/// Least-squares slope of ln(values[t]) against t over t in [0, last].
inline double fit_log_slope(const std::vector<double>& values, std::size_t last) {
  const std::size_t m = last + 1;
  double st = 0, sy = 0;
  for (std::size_t t = 0; t < m; ++t) {
    st += double(t);
    sy += std::log(values[t]);
  }
  const double tbar = st / double(m), ybar = sy / double(m);
  double num = 0, den = 0;
  for (std::size_t t = 0; t < m; ++t) {
    num += (double(t) - tbar) * (std::log(values[t]) - ybar);
    den += (double(t) - tbar) * (double(t) - tbar);
  }
  return den > 0 ? num / den : 0.0;
}

/// Per-index mean and standard error across equally long traces.
inline std::vector<MeanSe> pointwise_mean_se(const std::vector<std::vector<double>>& traces) {
  std::vector<MeanSe> out;
  if (traces.empty()) return out;
  std::vector<double> column(traces.size());
  for (std::size_t t = 0; t < traces.front().size(); ++t) {
    for (std::size_t i = 0; i < traces.size(); ++i) column[i] = traces[i][t];
    out.push_back(mean_se(column));
  }
  return out;
}

inline std::string fmt(double x) { return csv::format_number(x); }

inline bool within(double value, double bound) {
  return value <= bound + kExactTolerance * std::max(1.0, std::abs(bound));
}

/// Consistent data: the optimal error is rounding noise relative to ||y||^2.
inline bool is_consistent(double opt_error, const Eigen::VectorXd& y) {
  return opt_error <= 1e-20 * std::max(1.0, y.squaredNorm());
}

/// Absolute slack for quantities that vanish on consistent data.
inline double consistent_tolerance(const Eigen::VectorXd& y) { return 1e-10 * std::max(1.0, y.squaredNorm()); }

// ---------------------------------------------------------------------------

inline ExperimentReport verify_one_point(const ExperimentConfig& cfg, std::size_t /*threads*/ = 1) {
  if (cfg.k != 1) fail(ErrorCode::InvalidConfig, "one-point verification needs k = 1");
  Stopwatch clock;
  ExperimentReport rep{"one-point", cfg};
  const GeneratedProblem gen = generate_problem(cfg);
  const FittedProblem fitted = fit(gen.data);
  const LeverageProfile profile = leverage_scores(fitted.svd);
  const Eigen::VectorXd p = single_row_influences(profile);
  const auto n = double(cfg.n), d = double(cfg.d);
  const std::size_t rows = cfg.n;

  double expected = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double pi = p(Eigen::Index(i));
    if (pi > 0.0) expected += pi * leave_A_out_error(fitted, RowSubset({i}, rows));
  }
  const double opt = fitted.full.opt_error;
  const double factor = 1.0 + d / ((n - d) * (n - d));
  const double bound = factor * opt;
  const bool consistent = is_consistent(opt, gen.data.y());

  rep.measure("opt_error", opt);
  rep.measure("expected_error", expected);
  rep.measure("z1", profile.z1);
  rep.measure("coherence_mu", profile.coherence_mu);
  if (!consistent) rep.measure("expected_ratio", expected / opt);
  rep.bound("error_bound", bound, "(1 + d/(n-d)^2) * opt_error");
  rep.bound("bound_factor", factor, "1 + d/(n-d)^2");
  rep.bound("z1_minimum", (n - d) * (n - d) / d, "(n-d)^2/d");
  rep.bound("closed_form_expectation", opt * (1.0 + 1.0 / profile.z1), "(1 + 1/z1) * opt_error");

  rep.check("expectation_within_bound", within(expected, bound),
            "E = " + fmt(expected) + ", bound = " + fmt(bound));
  rep.check("z1_at_least_minimum", profile.z1 >= (n - d) * (n - d) / d - 1e-8,
            "z1 = " + fmt(profile.z1));
  if (consistent)
    rep.check("consistent_expected_error_zero", expected <= consistent_tolerance(gen.data.y()),
              "E = " + fmt(expected));
  if (cfg.design == DesignKind::HadamardUniform)
    rep.check("tight_at_uniform_leverage",
              std::abs(expected - bound) <= kExactTolerance * std::max(1.0, std::abs(bound)),
              "|E - bound| = " + fmt(std::abs(expected - bound)));
  rep.timing_seconds.emplace_back("total", clock.seconds());
  return rep;
}

// ---------------------------------------------------------------------------

inline ExperimentReport verify_k_points(const ExperimentConfig& cfg, std::size_t threads = 1) {
  if (cfg.k * cfg.d >= cfg.n) fail(ErrorCode::InvalidConfig, "k-points verification needs k < n/d");
  Stopwatch clock;
  ExperimentReport rep{"k-points", cfg};
  const GeneratedProblem gen = generate_problem(cfg);
  const FittedProblem fitted = fit(gen.data);
  const LeverageProfile profile = leverage_scores(fitted.svd);
  const auto n = double(cfg.n), d = double(cfg.d), k = double(cfg.k);
  const double opt = fitted.full.opt_error;
  const bool consistent = is_consistent(opt, gen.data.y());
  const double factor = 1.0 + d * k * k / ((n - d * k) * (n - d * k));
  rep.measure("opt_error", opt);
  rep.measure("coherence_mu", profile.coherence_mu);
  rep.bound("bound_factor", factor, "1 + d*k^2/(n-d*k)^2");
  rep.bound("error_bound", factor * opt, "(1 + d*k^2/(n-d*k)^2) * opt_error");
  const bool balanced_k = k <= n / (d + std::sqrt(n));
  if (balanced_k) rep.bound("balanced_factor", 1.0 + d / n, "1 + d/n for k <= n/(d + sqrt(n))");

  if (binomial(cfg.n, cfg.k) <= kMaxEnumeration) {
    rep.measure("mode_exact", 1.0);
    const SubsetDistribution dist = enumerate_subset_distribution(fitted.svd, profile, cfg.k);
    double expected = 0.0, max_increase = 0.0;
    for (const auto& e : dist.entries) {
      if (e.probability <= 0.0) continue;
      const double inc = leave_A_out_increase(fitted, e.influence.subset);
      max_increase = std::max(max_increase, inc);
      expected += e.probability * (opt + inc);
    }
    const double count = double(dist.entries.size());
    const double Q = dist.mean_spec;
    rep.measure("subsets", count);
    rep.measure("normalizer", dist.normalizer);
    rep.measure("mean_spec", Q);
    rep.measure("expected_error", expected);
    if (!consistent) rep.measure("expected_ratio", expected / opt);
    rep.bound("mean_spec_lower", k / n, "k/n");
    rep.bound("mean_spec_upper", d * k / n, "d*k/n");
    rep.bound("normalizer_lower", count * (1 - Q) * (1 - Q) / Q, "C(n,k) * (1-Q)^2/Q");
    rep.check("expectation_within_bound", within(expected, factor * opt),
              "E = " + fmt(expected) + ", bound = " + fmt(factor * opt));
    rep.check("mean_spec_in_range", Q >= k / n - kExactTolerance && Q <= d * k / n + kExactTolerance,
              "Q = " + fmt(Q));
    rep.check("normalizer_at_least_bound", dist.normalizer >= count * (1 - Q) * (1 - Q) / Q * (1 - kExactTolerance),
              "Z = " + fmt(dist.normalizer));
    if (consistent)
      rep.check("consistent_zero_increase", max_increase <= consistent_tolerance(gen.data.y()),
                "max increase = " + fmt(max_increase));
  } else {
    rep.measure("mode_exact", 0.0);
    const RejectionSampler sampler(fitted.svd, profile, cfg.k);
    struct Draw {
      bool ok = false;
      double increase = 0;
      std::size_t trials = 0;
    };
    const auto draws = parallel_map(cfg.trials, threads, [&](std::size_t t) {
      RngStream rng(cfg.seed, kStreamKPoints + t);
      Draw out;
      try {
        const RejectionResult res = sampler.sample(rng);
        out = {true, leave_A_out_increase(fitted, res.subset()), res.trials};
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TrialBudgetExceeded) throw;
      }
      return out;
    });
    std::vector<double> values;
    std::size_t proposals = 0, failures = 0;
    double max_increase = 0.0;
    for (const auto& dr : draws) {
      if (!dr.ok) {
        ++failures;
        continue;
      }
      proposals += dr.trials;
      max_increase = std::max(max_increase, dr.increase);
      values.push_back(consistent ? dr.increase : (opt + dr.increase) / opt);
    }
    const MeanSe ms = mean_se(values);
    const double accept_rate = proposals ? double(values.size()) / double(proposals) : 0.0;
    rep.measure("accepted_samples", double(values.size()));
    rep.measure("acceptance_rate", accept_rate);
    rep.bound("acceptance_lower_bound", acceptance_lower_bound(profile, cfg.k), "k^2/(n*mu)");
    rep.check("sampler_within_budget", failures == 0, std::to_string(failures) + " trials exhausted the budget");
    if (consistent) {
      rep.measure("mean_increase", ms.mean, ms.se);
      rep.check("consistent_zero_increase", max_increase <= consistent_tolerance(gen.data.y()),
                "max increase = " + fmt(max_increase));
    } else {
      rep.measure("mean_ratio", ms.mean, ms.se);
      const double upper = ms.mean + 3.0 * ms.se;
      rep.check("mean_plus_3se_within_bound", upper <= factor,
                "mean + 3 SE = " + fmt(upper) + ", bound = " + fmt(factor));
      if (balanced_k)
        rep.check("mean_plus_3se_within_one_plus_d_over_n", upper <= 1.0 + d / n,
                  "mean + 3 SE = " + fmt(upper) + ", bound = " + fmt(1.0 + d / n));
    }
  }
  rep.timing_seconds.emplace_back("total", clock.seconds());
  return rep;
}

// ---------------------------------------------------------------------------

inline ExperimentReport verify_sampler(const ExperimentConfig& cfg, std::size_t threads = 1) {
  Stopwatch clock;
  ExperimentReport rep{"sampler", cfg};
  const Dataset data = generate_dataset(cfg);
  const ThinSvd svd = thin_svd(data);
  const LeverageProfile profile = leverage_scores(svd);
  const RejectionSampler sampler(svd, profile, cfg.k);
  // Above the enumeration limit only the acceptance-rate checks run, and theta
  // is checked on the accepted draws.
  std::optional<SubsetDistribution> dist;
  if (binomial(cfg.n, cfg.k) <= kMaxEnumeration) dist = enumerate_subset_distribution(svd, profile, cfg.k);

  std::map<std::vector<std::size_t>, std::size_t> index;
  double theta_max = 0.0;
  if (dist) {
    for (std::size_t a = 0; a < dist->entries.size(); ++a) {
      index.emplace(dist->entries[a].influence.subset.indices(), a);
      theta_max = std::max(theta_max, dist->entries[a].influence.theta);
    }
  }

  struct Chunk {
    std::vector<std::size_t> hits;
    std::size_t proposals = 0;
    std::size_t singular_hits = 0;
    double theta_max = 0.0;
  };
  const std::size_t total = cfg.trials;
  const std::size_t chunks = (total + kSamplerChunk - 1) / kSamplerChunk;
  const auto results = parallel_map(chunks, threads, [&](std::size_t c) {
    RngStream rng(cfg.seed, kStreamSampler + c);
    Chunk out;
    const std::size_t m = std::min(kSamplerChunk, total - c * kSamplerChunk);
    out.hits.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      const RejectionResult res = sampler.sample(rng);
      out.proposals += res.trials;
      out.theta_max = std::max(out.theta_max, res.accepted.theta);
      if (res.accepted.spec >= kSingularProjection) ++out.singular_hits;
      if (dist) out.hits.push_back(index.at(res.subset().indices()));
    }
    return out;
  });

  std::vector<double> counts(dist ? dist->entries.size() : 0, 0.0);
  std::size_t proposals = 0, singular_hits = 0;
  for (const auto& ch : results) {
    proposals += ch.proposals;
    singular_hits += ch.singular_hits;
    if (!dist) theta_max = std::max(theta_max, ch.theta_max);
    for (auto a : ch.hits) counts[a] += 1.0;
  }

  const double rate = double(total) / double(proposals);
  const double rate_se = std::sqrt(rate * (1 - rate) / double(proposals));
  const AcceptanceEstimate est = estimate_acceptance(profile, cfg.k);

  rep.measure("draws", double(total));
  rep.measure(dist ? "theta_max" : "theta_max_accepted", theta_max);
  rep.measure("acceptance_rate", rate, rate_se);
  rep.measure("mean_trials", double(proposals) / double(total));
  rep.bound("acceptance_lower_bound", est.lower_bound, "k^2/(n*mu), proven for n >= 8*d*k");

  double exact_rate = 0.0;
  if (dist) {
    double tv = 0.0, noise_floor = 0.0;
    for (std::size_t a = 0; a < counts.size(); ++a) {
      const double p = dist->entries[a].probability;
      tv += std::abs(counts[a] / double(total) - p);
      noise_floor += std::sqrt(p * (1 - p) / double(total));
    }
    tv *= 0.5;
    // Expected TV of an exact sampler under multinomial noise, to first order.
    noise_floor *= 0.5 * std::sqrt(2.0 / std::numbers::pi);
    exact_rate = exact_acceptance_probability(profile, *dist);
    rep.measure("subsets", double(dist->entries.size()));
    rep.measure("tv_distance", tv);
    rep.measure("tv_noise_floor", noise_floor);
    rep.measure("exact_acceptance_probability", exact_rate);
    rep.bound("tv_threshold", kTvThreshold, "0.01");
    // The TV threshold only discriminates when sampling noise sits well below it.
    if (noise_floor <= 0.75 * kTvThreshold)
      rep.check("tv_below_threshold", tv < kTvThreshold, "TV = " + fmt(tv));
  }
  rep.check("theta_at_most_one", theta_max <= 1.0 + kExactTolerance, "max theta = " + fmt(theta_max));
  rep.check("never_returns_rank_losing_subset", singular_hits == 0, std::to_string(singular_hits) + " hits");
  if (est.precondition_met) {
    rep.check("acceptance_rate_at_least_bound", rate >= est.lower_bound - 3.0 * rate_se,
              "rate = " + fmt(rate) + ", bound = " + fmt(est.lower_bound));
    if (dist)
      rep.check("exact_acceptance_at_least_bound", exact_rate >= est.lower_bound * (1 - kExactTolerance),
                "exact = " + fmt(exact_rate));
  }
  rep.timing_seconds.emplace_back("total", clock.seconds());
  return rep;
}

// ---------------------------------------------------------------------------

inline SketchOperator make_sketch(SketchKind kind, std::size_t n_in, std::size_t r, RngStream& rng) {
  switch (kind) {
    case SketchKind::Identity: return make_identity_sketch(n_in);
    case SketchKind::DenseSign: return make_dense_sign_jlt(n_in, r, rng);
    case SketchKind::Srht: return make_srht(n_in, r, rng);
  }
  fail(ErrorCode::InvalidConfig, "unknown sketch kind");
}

/// max_i |sigma_i(X R^{-1}) * sigma_{d+1-i}(Pi U) - 1| and |kappa(X R^{-1}) / kappa(Pi U) - 1|.
struct InversionResidual {
  double sigma = 0;
  double kappa = 0;
  Eigen::VectorXd sigma_precond;
  double defect = 0;
};

inline InversionResidual inversion_residual(const Eigen::MatrixXd& X, const Eigen::MatrixXd& U,
                                            const SketchOperator& op) {
  const Preconditioner pre = build_preconditioner(X, op);
  const Eigen::MatrixXd sketched_basis = apply_sketch(op, U);
  const Eigen::VectorXd a = Eigen::JacobiSVD<Eigen::MatrixXd>(pre.right_apply_inverse(X)).singularValues();
  const Eigen::VectorXd b = Eigen::JacobiSVD<Eigen::MatrixXd>(sketched_basis).singularValues();
  const auto d = a.size();
  InversionResidual r;
  for (Eigen::Index i = 0; i < d; ++i) r.sigma = std::max(r.sigma, std::abs(a(i) * b(d - 1 - i) - 1.0));
  r.kappa = std::abs((a(0) / a(d - 1)) / (b(0) / b(d - 1)) - 1.0);
  r.sigma_precond = a;
  r.defect = embedding_defect(sketched_basis);
  return r;
}

inline std::size_t seeds_required(std::size_t trials) { return trials - trials / 20; }

inline ExperimentReport verify_preconditioner(const ExperimentConfig& cfg, std::size_t threads = 1) {
  Stopwatch clock;
  ExperimentReport rep{"precond", cfg};
  const Eigen::MatrixXd X = generate_design(cfg);
  const ThinSvd svd = thin_svd(X);
  const LeverageProfile profile = leverage_scores(svd);
  const std::size_t n_pad = next_power_of_two(cfg.n);
  const std::size_t r = cfg.r ? cfg.r : std::min(n_pad, 8 * cfg.d);
  const std::size_t r2 = simplified_jlt_dim(cfg.n);
  rep.measure("r", double(r));
  rep.measure("r2", double(r2));
  rep.measure("kappa_X", svd.kappa());

  // Identity sketch: X R^{-1} is orthonormal.
  {
    const InversionResidual id = inversion_residual(X, svd.U, make_identity_sketch(cfg.n));
    const double dev = (id.sigma_precond.array() - 1.0).abs().maxCoeff();
    rep.measure("identity_max_sigma_deviation", dev);
    rep.check("identity_sigma_one", dev < kExactTolerance, "max |sigma - 1| = " + fmt(dev));
    rep.check("inversion_identity_identity", id.sigma <= kIdentityTolerance && id.kappa <= kIdentityTolerance,
              "sigma residual = " + fmt(id.sigma) + ", kappa residual = " + fmt(id.kappa));
  }

  for (SketchKind kind : {SketchKind::DenseSign, SketchKind::Srht}) {
    const std::string name = to_string(kind);
    const auto res = parallel_map(cfg.trials, threads, [&](std::size_t t) {
      RngStream rng = RngStream(cfg.seed, kStreamSketch + t).substream(std::uint64_t(kind));
      return inversion_residual(X, svd.U, make_sketch(kind, cfg.n, r, rng));
    });
    double worst_sigma = 0, worst_kappa = 0, max_defect = 0;
    bool range_ok = true;
    std::size_t good_sketches = 0;
    for (const auto& x : res) {
      worst_sigma = std::max(worst_sigma, x.sigma);
      worst_kappa = std::max(worst_kappa, x.kappa);
      max_defect = std::max(max_defect, x.defect);
      if (x.defect <= 0.5) {
        ++good_sketches;
        const Eigen::ArrayXd s2 = x.sigma_precond.array().square();
        range_ok = range_ok && s2.minCoeff() >= 0.5 - kExactTolerance && s2.maxCoeff() <= 2.0 + kExactTolerance;
      }
    }
    rep.measure(name + "_max_sigma_residual", worst_sigma);
    rep.measure(name + "_max_kappa_residual", worst_kappa);
    rep.measure(name + "_max_defect", max_defect);
    rep.measure(name + "_sketches_with_defect_at_most_half", double(good_sketches));
    rep.check("inversion_identity_" + name, worst_sigma <= kIdentityTolerance,
              "max residual = " + fmt(worst_sigma));
    rep.check("condition_number_" + name, worst_kappa <= kIdentityTolerance, "max residual = " + fmt(worst_kappa));
    rep.check("sigma_sq_in_half_two_" + name, range_ok, "over sketches with defect <= 1/2");
  }

  // Approximate leverage: Pi_1 an SRHT of dimension r, Pi_2 a sign sketch of dimension r2.
  struct LevResult {
    bool jlt_ok = false;
    bool end_to_end_applicable = false;
    bool end_to_end_ok = false;
    double min_ratio = 0, max_ratio = 0;
  };
  const auto lev = parallel_map(cfg.trials, threads, [&](std::size_t t) {
    RngStream rng = RngStream(cfg.seed, kStreamSketch + t).substream(7);
    const SketchOperator op1 = make_srht(cfg.n, r, rng);
    const Preconditioner pre = build_preconditioner(X, op1);
    const SketchOperator op2 = make_dense_sign_jlt(cfg.d, r2, rng);
    const Eigen::ArrayXd hat = approx_leverage(X, pre, op2).ell_hat.array();
    const Eigen::ArrayXd exact_rows = preconditioned_row_norms(X, pre).array();
    const Eigen::ArrayXd ratio = hat / exact_rows;
    LevResult out;
    out.min_ratio = ratio.minCoeff();
    out.max_ratio = ratio.maxCoeff();
    out.jlt_ok = out.min_ratio >= 0.5 && out.max_ratio <= 1.5;
    out.end_to_end_applicable = out.jlt_ok && jlt_defect(op1, svd.U) <= 0.5;
    const Eigen::ArrayXd vs_exact = hat / profile.ell.array();
    out.end_to_end_ok = vs_exact.minCoeff() >= 0.25 && vs_exact.maxCoeff() <= 3.0;
    return out;
  });
  std::size_t jlt_ok = 0, e2e_applicable = 0, e2e_ok = 0;
  double lo = INFINITY, hi = 0;
  for (const auto& x : lev) {
    jlt_ok += x.jlt_ok;
    lo = std::min(lo, x.min_ratio);
    hi = std::max(hi, x.max_ratio);
    if (x.end_to_end_applicable) {
      ++e2e_applicable;
      e2e_ok += x.end_to_end_ok;
    }
  }
  rep.measure("approx_leverage_seeds_within_factor", double(jlt_ok));
  rep.measure("approx_leverage_min_ratio", lo);
  rep.measure("approx_leverage_max_ratio", hi);
  rep.bound("approx_leverage_seeds_required", double(seeds_required(cfg.trials)), "trials - floor(trials/20)");
  rep.check("approx_leverage_half_three_halves", jlt_ok >= seeds_required(cfg.trials),
            std::to_string(jlt_ok) + "/" + std::to_string(cfg.trials) + " seeds within [1/2, 3/2]");
  rep.check("approx_leverage_vs_exact_quarter_three", e2e_ok == e2e_applicable,
            std::to_string(e2e_ok) + "/" + std::to_string(e2e_applicable) + " qualifying seeds within [1/4, 3]");
  {
    const SketchOperator id1 = make_identity_sketch(cfg.n);
    const SketchOperator id2 = make_identity_sketch(cfg.d);
    const Eigen::VectorXd hat = approx_leverage(X, build_preconditioner(X, id1), id2).ell_hat;
    const double dev = (hat - profile.ell).cwiseAbs().maxCoeff();
    rep.measure("identity_leverage_max_deviation", dev);
    rep.check("identity_sketches_exact_leverage", dev <= kExactTolerance, "max |l_hat - l| = " + fmt(dev));
  }
  rep.timing_seconds.emplace_back("total", clock.seconds());
  return rep;
}

// ---------------------------------------------------------------------------

inline ExperimentReport verify_jlt(const ExperimentConfig& cfg, std::size_t threads = 1) {
  Stopwatch clock;
  ExperimentReport rep{"jlt", cfg};
  const Eigen::MatrixXd X = generate_design(cfg);
  const ThinSvd svd = thin_svd(X);
  const std::size_t n_pad = next_power_of_two(cfg.n);
  const std::size_t r_requested = cfg.r ? cfg.r : srht_dim(cfg.n, cfg.d, 0.5, 0.05);
  const std::size_t r = std::min(r_requested, n_pad);
  const std::size_t r_sign = jlt_dim(cfg.n, 0.5, 1.0);
  const std::size_t r_reduced = std::max(cfg.d, n_pad / 4);
  rep.measure("r_requested", double(r_requested));
  rep.measure("r_used", double(r));
  rep.measure("r_sign", double(r_sign));
  rep.measure("r_reduced", double(r_reduced));

  struct SeedResult {
    double srht = 0, sign = 0, reduced = 0;
    bool props = true;
    double pinv_residual = 0;
  };
  auto props_ok = [&](const Eigen::MatrixXd& sketched_basis, const Eigen::MatrixXd& sketched_X, double& resid) {
    const EmbeddingProperties p = embedding_properties(sketched_basis);
    if (!(p.defect < 1.0)) return true;  // nothing is claimed
    resid = std::max(resid, pinv_factorization_residual(sketched_X, sketched_basis, svd.sigma, svd.V));
    return p.holds();
  };
  const auto res = parallel_map(cfg.trials, threads, [&](std::size_t t) {
    RngStream base(cfg.seed, kStreamSketch + t);
    RngStream r1 = base.substream(1), r2 = base.substream(2), r3 = base.substream(3);
    SeedResult out;
    const SketchOperator srht = make_srht(cfg.n, r, r1);
    const SketchOperator sign = make_dense_sign_jlt(cfg.n, r_sign, r2);
    const SketchOperator reduced = make_srht(cfg.n, r_reduced, r3);
    for (const SketchOperator* op : {&srht, &sign, &reduced}) {
      const Eigen::MatrixXd PU = apply_sketch(*op, svd.U);
      const double e = embedding_defect(PU);
      if (op == &srht) out.srht = e;
      else if (op == &sign) out.sign = e;
      else out.reduced = e;
      out.props = props_ok(PU, apply_sketch(*op, X), out.pinv_residual) && out.props;
    }
    return out;
  });
  std::size_t srht_ok = 0, sign_ok = 0;
  bool props = true;
  double resid = 0;
  std::vector<double> srht_defects, sign_defects, reduced_defects;
  for (const auto& x : res) {
    srht_ok += x.srht <= 0.5;
    sign_ok += x.sign <= 0.5;
    props = props && x.props;
    resid = std::max(resid, x.pinv_residual);
    srht_defects.push_back(x.srht);
    sign_defects.push_back(x.sign);
    reduced_defects.push_back(x.reduced);
  }
  const auto sign_required = std::size_t(std::ceil(double(cfg.trials) * (1.0 - 1.0 / double(cfg.n)) - 1e-9));
  rep.measure("srht_seeds_defect_at_most_half", double(srht_ok));
  rep.measure("sign_seeds_defect_at_most_half", double(sign_ok));
  rep.measure("max_srht_defect", *std::max_element(srht_defects.begin(), srht_defects.end()));
  rep.measure("max_sign_defect", *std::max_element(sign_defects.begin(), sign_defects.end()));
  rep.measure("mean_reduced_srht_defect", mean_se(reduced_defects).mean, mean_se(reduced_defects).se);
  rep.measure("max_pinv_factorization_residual", resid);
  rep.bound("srht_dim", double(r_requested), "(12/(5 eps^2)) (sqrt(d) + sqrt(8 ln(3n/gamma)))^2 ln d, eps=1/2, gamma=0.05");
  rep.bound("jlt_dim", double(r_sign), "(8 + 4 beta)/(eps^2 - 2 eps^3/3) ln(n+1), eps=1/2, beta=1");
  rep.series["srht_defects"] = srht_defects;
  rep.series["sign_defects"] = sign_defects;
  rep.series["reduced_srht_defects"] = reduced_defects;

  std::string note = std::to_string(srht_ok) + "/" + std::to_string(cfg.trials) + " seeds";
  if (r < r_requested)
    note += "; r clamped from " + std::to_string(r_requested) + " to the padded size " + std::to_string(n_pad) +
            ", so the sketch is orthogonal";
  rep.check("srht_defect_at_most_half", srht_ok >= seeds_required(cfg.trials), note);
  rep.check("sign_defect_frequency", sign_ok >= sign_required,
            std::to_string(sign_ok) + "/" + std::to_string(cfg.trials) + " seeds, need " +
                std::to_string(sign_required));
  rep.check("embedding_properties_hold", props, "parts 1-5 with the measured defect");
  rep.check("pinv_factorization", resid <= kIdentityTolerance, "max residual = " + fmt(resid));
  rep.timing_seconds.emplace_back("total", clock.seconds());
  return rep;
}

// ---------------------------------------------------------------------------

inline ExperimentReport verify_kaczmarz(const ExperimentConfig& cfg, std::size_t threads = 1) {
  if (cfg.noise != 0.0) fail(ErrorCode::InvalidConfig, "kaczmarz verification needs consistent data (noise = 0)");
  Stopwatch clock;
  ExperimentReport rep{"kaczmarz", cfg};
  const GeneratedProblem gen = generate_problem(cfg);
  const Eigen::MatrixXd& X = gen.data.X();
  const Eigen::VectorXd& y = gen.data.y();
  const FittedProblem fitted = fit(gen.data);
  const ThinSvd& svd = fitted.svd;
  const Eigen::VectorXd& w_star = fitted.full.w_star;
  const double w_sq = w_star.squaredNorm();
  const auto n = double(cfg.n), d = double(cfg.d);
  const double kappa = svd.kappa();
  rep.measure("kappa", kappa);
  rep.measure("w_star_sq_norm", w_sq);

  KaczmarzOptions opts;
  opts.w_star = w_star;

  // Exact variant.
  const std::size_t K_exact = labels_for_target(KaczmarzVariant::Exact, svd);
  rep.bound("exact_iterations", double(K_exact), "ceil(d ln(n kappa^2/d))");
  {
    const auto runs = parallel_map(cfg.trials, threads, [&](std::size_t t) {
      RngStream rng(cfg.seed, kStreamExact + t);
      return kaczmarz_exact(svd, y, K_exact, rng, opts);
    });
    std::vector<double> final_err;
    std::vector<std::vector<double>> traces;
    bool labels_ok = true;
    for (const auto& run : runs) {
      final_err.push_back((run.w - w_star).squaredNorm());
      traces.push_back(*run.error_trace);
      labels_ok = labels_ok && run.labels_used <= run.iterations && run.labels_used <= cfg.n;
    }
    const MeanSe fe = mean_se(final_err);
    const double target = 1.5 * d / n * w_sq;
    rep.measure("exact_mean_final_error", fe.mean, fe.se);
    rep.bound("exact_final_error_target", target, "1.5 (d/n) ||w*||^2");
    rep.check("exact_final_error", fe.mean <= target, "mean = " + fmt(fe.mean) + ", target = " + fmt(target));

    const auto pts = pointwise_mean_se(traces);
    bool monotone = true;
    for (std::size_t t = 1; t < pts.size(); ++t)
      monotone = monotone && pts[t].mean <= pts[t - 1].mean * (1 + 1e-12) + 1e-300;

    // Rate bound on separate short runs, paired across t.
    const std::size_t horizon = std::min<std::size_t>(5 * cfg.d, K_exact);
    const auto short_runs = parallel_map(kRateTrials, threads, [&](std::size_t t) {
      RngStream rng(cfg.seed, kStreamRate + t);
      return *kaczmarz_exact(svd, y, horizon, rng, opts).error_trace;
    });
    const auto rate_pts = pointwise_mean_se(short_runs);
    const double v0 = short_runs.front().front();
    bool rate_ok = true;
    for (std::size_t t = 0; t <= horizon; ++t)
      rate_ok = rate_ok && rate_pts[t].mean - 3 * rate_pts[t].se <= std::pow(1 - 1 / d, double(t)) * v0 * (1 + 1e-12);
    rep.check("exact_rate_bound", rate_ok,
              "mean - 3 SE <= (1-1/d)^t ||v*||^2 for t <= " + std::to_string(horizon) + " over " +
                  std::to_string(kRateTrials) + " runs");
    rep.check("exact_monotone_mean_error", monotone);
    rep.check("exact_label_accounting", labels_ok);
    std::vector<double> mean_trace;
    for (const auto& p : pts) mean_trace.push_back(p.mean);
    rep.series["exact_mean_error_trace"] = mean_trace;

    std::vector<double> ratios(kContractionSteps);
    for (std::size_t s = 0; s < kContractionSteps; ++s) {
      RngStream rng(cfg.seed, kStreamContraction + s);
      const KaczmarzRun one = kaczmarz_exact(svd, y, 1, rng, opts);
      ratios[s] = (*one.error_trace)[1] / (*one.error_trace)[0];
    }
    const MeanSe c = mean_se(ratios);
    rep.measure("exact_step_contraction", c.mean, c.se);
    rep.bound("exact_step_contraction_bound", 1 - 1 / d, "1 - 1/d");
    rep.check("exact_step_contraction", c.mean <= 1 - 1 / d + 3 * c.se,
              "mean = " + fmt(c.mean) + ", bound + 3 SE = " + fmt(1 - 1 / d + 3 * c.se));
  }

  // Fast variant against unpreconditioned row-norm Kaczmarz.
  const std::size_t K_fast = labels_for_target(KaczmarzVariant::Fast, n, d, kappa, w_sq);
  rep.bound("fast_iterations", double(K_fast), "ceil(9 d ln(n kappa ||w*||^2/d))");
  {
    struct FastResult {
      std::vector<double> trace;
      double final_w = 0, baseline_w = 0;
      std::size_t preprocessing_queries = 0, labels_used = 0;
      bool w_bound_ok = true;
    };
    const auto runs = parallel_map(cfg.trials, threads, [&](std::size_t t) {
      RngStream rng(cfg.seed, kStreamFast + t);
      LabelOracle oracle(y);
      const FastPreprocessing prep = prepare_fast_kaczmarz(X, rng);
      FastResult out;
      out.preprocessing_queries = oracle.total_queries();
      const KaczmarzRun run = run_fast_kaczmarz(prep, X, oracle, K_fast, rng, opts);
      out.labels_used = run.labels_used;
      out.trace = *run.error_trace;
      out.final_w = (run.w - w_star).squaredNorm();
      const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(prep.precond.T()).singularValues().minCoeff();
      const auto& wt = *run.weight_error_trace;
      for (std::size_t i = 0; i < wt.size(); ++i)
        out.w_bound_ok = out.w_bound_ok && wt[i] <= out.trace[i] / (smin * smin) * (1 + 1e-6) + 1e-24 * w_sq;
      RngStream brng(cfg.seed, kStreamBaseline + t);
      out.baseline_w = (kaczmarz_row_norm(X, y, K_fast, brng).w - w_star).squaredNorm();
      return out;
    });
    std::vector<std::vector<double>> traces;
    std::vector<double> fast_w, base_w;
    bool no_prep_labels = true, labels_ok = true, w_bound_ok = true;
    for (const auto& r : runs) {
      traces.push_back(r.trace);
      fast_w.push_back(r.final_w / w_sq);
      base_w.push_back(r.baseline_w / w_sq);
      no_prep_labels = no_prep_labels && r.preprocessing_queries == 0;
      labels_ok = labels_ok && r.labels_used <= K_fast && r.labels_used <= cfg.n;
      w_bound_ok = w_bound_ok && r.w_bound_ok;
    }
    const auto pts = pointwise_mean_se(traces);
    std::vector<double> mean_trace;
    for (const auto& p : pts) mean_trace.push_back(p.mean);
    // Fit up to the rounding floor; beyond it the trace carries no rate information.
    std::size_t last = 0;
    while (last + 1 < mean_trace.size() && mean_trace[last + 1] > 1e-20 * mean_trace[0]) ++last;
    const double slope = fit_log_slope(mean_trace, last);
    const double slope_bound = std::log(1 - 1 / (9 * d)) + 0.02;
    const double v0 = mean_trace[0];
    bool rate_ok = true;
    for (std::size_t t = 0; t <= std::min<std::size_t>(5 * cfg.d, K_fast); ++t)
      rate_ok = rate_ok && pts[t].mean - 3 * pts[t].se <= std::pow(1 - 1 / (9 * d), double(t)) * v0 * (1 + 1e-12);
    const MeanSe fw = mean_se(fast_w), bw = mean_se(base_w);

    rep.measure("fast_log_slope", slope);
    rep.measure("fast_fit_last_index", double(last));
    rep.measure("fast_relative_w_error", fw.mean, fw.se);
    rep.measure("baseline_relative_w_error", bw.mean, bw.se);
    rep.bound("fast_log_slope_bound", slope_bound, "ln(1 - 1/(9d)) + 0.02");
    rep.series["fast_mean_error_trace"] = mean_trace;
    rep.check("fast_log_slope", slope <= slope_bound, "slope = " + fmt(slope) + ", bound = " + fmt(slope_bound));
    rep.check("fast_rate_bound", rate_ok, "mean - 3 SE <= (1-1/(9d))^t ||v*||^2 for t <= 5d");
    rep.check("fast_preprocessing_reads_no_labels", no_prep_labels);
    rep.check("fast_label_accounting", labels_ok, "labels_used <= K = " + std::to_string(K_fast));
    rep.check("fast_w_space_bound", w_bound_ok, "||w_t - w*||^2 <= ||v_t - v*||^2 / sigma_min(R)^2");
    rep.check("preconditioning_beats_row_norm_10x", bw.mean >= 10 * fw.mean,
              "baseline = " + fmt(bw.mean) + ", fast = " + fmt(fw.mean));
  }
  rep.timing_seconds.emplace_back("total", clock.seconds());
  return rep;
}

// ---------------------------------------------------------------------------

inline ExperimentReport run_verification(const std::string& which, const ExperimentConfig& cfg,
                                         std::size_t threads = 1) {
  if (which == "one-point") return verify_one_point(cfg, threads);
  if (which == "k-points") return verify_k_points(cfg, threads);
  if (which == "sampler") return verify_sampler(cfg, threads);
  if (which == "precond") return verify_preconditioner(cfg, threads);
  if (which == "kaczmarz") return verify_kaczmarz(cfg, threads);
  if (which == "jlt") return verify_jlt(cfg, threads);
  fail(ErrorCode::InvalidConfig, "unknown verification '" + which + "'");
}

}  // namespace lcr::lab
