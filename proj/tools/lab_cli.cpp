// lab_cli: data generation, solvers, samplers, sketches and verification
// experiments from the command line.

#include <algorithm>
#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lcr/lab/verify.hpp"
#include "lcr/lcr.hpp"

namespace {

using lcr::ErrorCode;
using lcr::fail;
using nlohmann::json;

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out;
  std::string config;
};

/// Flags that mirror ExperimentConfig; only flags given on the command line
/// override the config file.
struct ConfigFlags {
  std::optional<std::string> id, design;
  std::optional<std::size_t> n, d, k, trials, r;
  std::optional<double> spike_fraction, kappa, noise;

  void add_to(CLI::App* app) {
    app->add_option("--id", id, "Experiment id");
    app->add_option("--n", n, "Rows");
    app->add_option("--d", d, "Columns");
    app->add_option("--k", k, "Subset size");
    app->add_option("--design", design, "gaussian | hadamard-uniform | coherent");
    app->add_option("--spike-fraction", spike_fraction, "Fraction of scaled rows (coherent design)");
    app->add_option("--kappa", kappa, "Condition number of the design (1 keeps the generated spectrum)");
    app->add_option("--noise", noise, "Label noise level");
    app->add_option("--trials", trials, "Trials or draws");
    app->add_option("--r", r, "Sketch dimension override");
  }

  lcr::lab::ExperimentConfig resolve(const GlobalOptions& g, const CLI::App& root) const {
    lcr::lab::ExperimentConfig cfg;
    if (!g.config.empty()) cfg = lcr::lab::load_config(g.config);
    if (id) cfg.id = *id;
    if (n) cfg.n = *n;
    if (d) cfg.d = *d;
    if (k) cfg.k = *k;
    if (design) cfg.design = lcr::lab::parse_design(*design);
    if (spike_fraction) cfg.spike_fraction = *spike_fraction;
    if (kappa) cfg.kappa = *kappa;
    if (noise) cfg.noise = *noise;
    if (trials) cfg.trials = *trials;
    if (r) cfg.r = *r;
    if (root.count("--seed")) cfg.seed = g.seed;
    if (root.count("--out")) cfg.out = g.out;
    cfg.validate();
    return cfg;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidConfig, "cannot write " + path);
  out << text;
}

void write_json(const std::string& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string matrix_csv(const Eigen::MatrixXd& M) {
  std::ostringstream s;
  lcr::csv::write_matrix(s, M);
  return s.str();
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<std::size_t> parse_indices(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string field;
  while (std::getline(ss, field, ';')) {
    if (field.empty()) continue;
    try {
      out.push_back(std::stoul(field));
    } catch (const std::exception&) {
      fail(ErrorCode::ParseError, "bad row index '" + field + "'");
    }
  }
  return out;
}

lcr::SketchKind parse_kind(const std::string& s) {
  if (s == "srht") return lcr::SketchKind::Srht;
  if (s == "sign") return lcr::SketchKind::DenseSign;
  if (s == "identity") return lcr::SketchKind::Identity;
  fail(ErrorCode::InvalidConfig, "unknown sketch kind '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Label-efficient least squares lab"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output path (stdout when omitted)");
  app.add_option("--config", g.config, "Experiment config (JSON)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
  ConfigFlags gen_flags;
  gen_flags.add_to(gen);
  std::string gen_x = "X.csv", gen_y = "y.csv", gen_w;
  gen->add_option("--x-out", gen_x, "Design matrix CSV");
  gen->add_option("--y-out", gen_y, "Labels CSV");
  gen->add_option("--w-out", gen_w, "Planted weights CSV");

  // solve
  auto* solve = app.add_subcommand("solve", "Least-squares fit and optional leave-A-out error");
  std::string solve_x, solve_y, solve_drop;
  solve->add_option("--x", solve_x, "Design matrix CSV")->required();
  solve->add_option("--y", solve_y, "Labels CSV")->required();
  solve->add_option("--drop", solve_drop, "Rows to leave out, separated by ';' or ','");

  // reject-sample
  auto* rs = app.add_subcommand("reject-sample", "Draw k-subsets from the joint influence distribution");
  std::string rs_x, rs_enum;
  std::size_t rs_k = 1, rs_count = 1, rs_max = 0;
  rs->add_option("--x", rs_x, "Design matrix CSV")->required();
  rs->add_option("--k", rs_k, "Subset size")->required();
  rs->add_option("--count", rs_count, "Number of accepted subsets");
  rs->add_option("--max-trials", rs_max, "Proposal budget per sample (default 50 n mu / k^2)");
  rs->add_option("--enumerate", rs_enum, "Also write the enumerated distribution to this CSV");

  // sketch
  auto* sk = app.add_subcommand("sketch", "Apply a random sketch to a matrix");
  std::string sk_x, sk_kind = "srht";
  std::size_t sk_r = 0;
  sk->add_option("--x", sk_x, "Input matrix CSV")->required();
  sk->add_option("--kind", sk_kind, "srht | sign")->check(CLI::IsMember({"srht", "sign"}));
  sk->add_option("--r", sk_r, "Embedding dimension")->required();

  // precond
  auto* pc = app.add_subcommand("precond", "Sketch-and-QR preconditioner");
  std::string pc_x, pc_kind = "srht", pc_t = "T.csv", pc_p = "P.csv";
  std::size_t pc_r = 0;
  pc->add_option("--x", pc_x, "Design matrix CSV")->required();
  pc->add_option("--kind", pc_kind, "srht | sign | identity")->check(CLI::IsMember({"srht", "sign", "identity"}));
  pc->add_option("--r", pc_r, "Sketch dimension (ignored for identity)");
  pc->add_option("--t-out", pc_t, "Triangular factor CSV");
  pc->add_option("--p-out", pc_p, "Permutation matrix CSV");

  // kaczmarz
  auto* kz = app.add_subcommand("kaczmarz", "Randomized Kaczmarz on a consistent system");
  std::string kz_x, kz_y, kz_mode = "fast", kz_trace;
  std::size_t kz_iters = 0;
  kz->add_option("--x", kz_x, "Design matrix CSV")->required();
  kz->add_option("--y", kz_y, "Labels CSV")->required();
  kz->add_option("--mode", kz_mode, "exact | fast")->check(CLI::IsMember({"exact", "fast"}));
  kz->add_option("--iters", kz_iters, "Iterations (default from the label-count formula)");
  kz->add_option("--trace", kz_trace, "Error trace CSV (t, squared_error); solves the full problem for v*");

  // verify
  auto* vf = app.add_subcommand("verify", "Run a verification experiment and emit a JSON report");
  std::string vf_which;
  bool vf_no_timing = false;
  ConfigFlags vf_flags;
  vf_flags.add_to(vf);
  vf->add_option("experiment", vf_which, "one-point | k-points | sampler | precond | kaczmarz | jlt")
      ->required()
      ->check(CLI::IsMember({"one-point", "k-points", "sampler", "precond", "kaczmarz", "jlt"}));
  vf->add_flag("--no-timing", vf_no_timing, "Omit wall-clock fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*gen) {
      const auto cfg = gen_flags.resolve(g, app);
      const auto problem = lcr::lab::generate_problem(cfg);
      lcr::csv::write_matrix_file(gen_x, problem.data.X());
      lcr::csv::write_matrix_file(gen_y, problem.data.y());
      if (!gen_w.empty()) lcr::csv::write_matrix_file(gen_w, problem.w_planted);
      return 0;
    }

    if (*solve) {
      const lcr::Dataset data(lcr::csv::read_matrix_file(solve_x), lcr::csv::read_vector_file(solve_y));
      const lcr::FittedProblem fitted = lcr::fit(data);
      const lcr::LeverageProfile profile = lcr::leverage_scores(fitted.svd);
      json j{{"n", data.n()},
             {"d", data.d()},
             {"w_star", to_vector(fitted.full.w_star)},
             {"opt_error", fitted.full.opt_error},
             {"sigma", to_vector(fitted.svd.sigma)},
             {"kappa", fitted.svd.kappa()},
             {"leverage", to_vector(profile.ell)},
             {"coherence_mu", profile.coherence_mu}};
      if (!solve_drop.empty()) {
        const lcr::RowSubset A(parse_indices(solve_drop), std::size_t(data.n()));
        const lcr::DeficientFit df = lcr::deficient_solve(data, fitted, A);
        j["drop"] = {{"subset", A.to_string()},
                     {"spec", lcr::partial_projection_norm(fitted.svd, A)},
                     {"w_minus", to_vector(df.w_minus)},
                     {"full_error", df.full_error},
                     {"error_increase", df.error_increase},
                     {"closed_form_error", lcr::leave_A_out_error(fitted, A)}};
      }
      write_json(g.out, j);
      return 0;
    }

    if (*rs) {
      const lcr::Dataset data(lcr::csv::read_matrix_file(rs_x));
      const lcr::ThinSvd svd = lcr::thin_svd(data);
      const lcr::LeverageProfile profile = lcr::leverage_scores(svd);
      const lcr::RejectionSampler sampler(svd, profile, rs_k);
      const std::size_t budget = rs_max ? rs_max : lcr::default_max_trials(profile, rs_k);
      lcr::RngStream rng(g.seed);
      json samples = json::array();
      for (std::size_t i = 0; i < rs_count; ++i) {
        const lcr::RejectionResult res = sampler.sample(rng, budget);
        samples.push_back({{"subset", res.subset().indices()},
                           {"trials", res.trials},
                           {"spec", res.accepted.spec},
                           {"theta", res.accepted.theta}});
      }
      if (!rs_enum.empty()) {
        std::ofstream out(rs_enum);
        if (!out) fail(ErrorCode::InvalidConfig, "cannot write " + rs_enum);
        lcr::write_distribution_csv(out, lcr::enumerate_subset_distribution(svd, profile, rs_k));
      }
      write_json(g.out, {{"k", rs_k},
                         {"seed", g.seed},
                         {"max_trials", budget},
                         {"acceptance_lower_bound", lcr::acceptance_lower_bound(profile, rs_k)},
                         {"samples", samples}});
      return 0;
    }

    if (*sk) {
      const Eigen::MatrixXd M = lcr::csv::read_matrix_file(sk_x);
      lcr::RngStream rng(g.seed);
      const auto op = lcr::lab::make_sketch(parse_kind(sk_kind), std::size_t(M.rows()), sk_r, rng);
      write_text(g.out, matrix_csv(lcr::apply_sketch(op, M)));
      return 0;
    }

    if (*pc) {
      const lcr::Dataset data(lcr::csv::read_matrix_file(pc_x));
      const auto n = std::size_t(data.n()), d = std::size_t(data.d());
      const lcr::SketchKind kind = parse_kind(pc_kind);
      const std::size_t r = pc_r ? pc_r : std::min(lcr::next_power_of_two(n), 8 * d);
      lcr::RngStream rng(g.seed);
      const auto op = lcr::lab::make_sketch(kind, n, r, rng);
      const lcr::Preconditioner pre = lcr::build_preconditioner(data.X(), op);
      lcr::csv::write_matrix_file(pc_t, pre.T());
      lcr::csv::write_matrix_file(pc_p, pre.P());
      const Eigen::VectorXd s =
          Eigen::JacobiSVD<Eigen::MatrixXd>(pre.right_apply_inverse(data.X())).singularValues();
      write_json(g.out, {{"kind", lcr::to_string(kind)},
                         {"r", op.r},
                         {"seed", g.seed},
                         {"permutation", pre.permutation()},
                         {"sigma_precond", to_vector(s)},
                         {"kappa_precond", s(0) / s(s.size() - 1)},
                         {"kappa_X", lcr::thin_svd(data).kappa()}});
      return 0;
    }

    if (*kz) {
      const lcr::Dataset data(lcr::csv::read_matrix_file(kz_x), lcr::csv::read_vector_file(kz_y));
      const bool exact = kz_mode == "exact";
      const lcr::ThinSvd svd = lcr::thin_svd(data);
      const std::size_t K = kz_iters ? kz_iters
                                     : lcr::labels_for_target(exact ? lcr::KaczmarzVariant::Exact
                                                                    : lcr::KaczmarzVariant::Fast,
                                                              svd);
      lcr::KaczmarzOptions opts;
      if (!kz_trace.empty()) opts.w_star = lcr::full_solve(data, svd).w_star;
      lcr::RngStream rng(g.seed);
      const lcr::KaczmarzRun run =
          exact ? lcr::kaczmarz_exact(svd, data.y(), K, rng, opts) : lcr::kaczmarz_fast(data, K, rng, {}, opts);
      if (!kz_trace.empty()) {
        std::ofstream out(kz_trace);
        if (!out) fail(ErrorCode::InvalidConfig, "cannot write " + kz_trace);
        out << "t,squared_error\n";
        const auto& tr = *run.error_trace;
        for (std::size_t t = 0; t < tr.size(); ++t) out << t << ',' << lcr::csv::format_number(tr[t]) << '\n';
      }
      write_json(g.out, {{"mode", kz_mode},
                         {"seed", g.seed},
                         {"iterations", run.iterations},
                         {"labels_used", run.labels_used},
                         {"w", to_vector(run.w)}});
      return 0;
    }

    if (*vf) {
      const auto cfg = vf_flags.resolve(g, app);
      const auto report = lcr::lab::run_verification(vf_which, cfg, g.threads);
      write_text(cfg.out, report.dump(!vf_no_timing));
      for (const auto& c : report.criteria)
        if (!c.passed) std::cerr << "FAIL " << c.name << ": " << c.detail << "\n";
      return report.passed() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
