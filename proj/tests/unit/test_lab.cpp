#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "lcr/lab/config.hpp"
#include "lcr/lab/generate.hpp"
#include "lcr/lab/report.hpp"
#include "lcr/lab/verify.hpp"
#include "support/helpers.hpp"
#include "support/oracles.hpp"

using lcr::lab::DesignKind;
using lcr::lab::ExperimentConfig;
using testing_support::code_of;

namespace {

ExperimentConfig config(DesignKind kind, std::size_t n, std::size_t d, std::size_t k = 1) {
  ExperimentConfig cfg;
  cfg.design = kind;
  cfg.n = n;
  cfg.d = d;
  cfg.k = k;
  return cfg;
}

const lcr::lab::CriterionResult* find(const lcr::lab::ExperimentReport& rep, const std::string& name) {
  for (const auto& c : rep.criteria)
    if (c.name == name) return &c;
  return nullptr;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("lcr_test_" + name)).string();
}

}  // namespace

TEST(Generate, HadamardDesignHasUniformLeverage) {
  const auto data = lcr::lab::generate_dataset(config(DesignKind::HadamardUniform, 16, 2));
  const Eigen::VectorXd ell = oracle::hat_diagonal(data.X());
  for (Eigen::Index i = 0; i < 16; ++i) EXPECT_NEAR(ell(i), 0.125, 1e-12);
}

TEST(Generate, NoiselessLabelsAreConsistent) {
  auto cfg = config(DesignKind::Gaussian, 50, 4);
  cfg.noise = 0.0;
  const auto gen = lcr::lab::generate_problem(cfg);
  EXPECT_LE((gen.data.X() * gen.w_planted - gen.data.y()).norm(), 1e-12);
  EXPECT_LE(lcr::full_solve(gen.data).opt_error, 1e-20 * gen.data.y().squaredNorm());
}

TEST(Generate, CoherentDesignIsMoreCoherent) {
  const auto g = lcr::leverage_scores(lcr::thin_svd(lcr::lab::generate_design(config(DesignKind::Gaussian, 200, 5))));
  const auto c = lcr::leverage_scores(lcr::thin_svd(lcr::lab::generate_design(config(DesignKind::Coherent, 200, 5))));
  EXPECT_GE(c.coherence_mu, 2 * g.coherence_mu);
}

TEST(Generate, KappaSetsConditionNumberAndKeepsLeverage) {
  auto cfg = config(DesignKind::Coherent, 100, 4);
  const Eigen::MatrixXd base = lcr::lab::generate_design(cfg);
  cfg.kappa = 1e5;
  const Eigen::MatrixXd X = lcr::lab::generate_design(cfg);
  EXPECT_NEAR(lcr::thin_svd(X).kappa() / 1e5, 1.0, 1e-6);
  const Eigen::VectorXd before = lcr::leverage_scores(lcr::thin_svd(base)).ell;
  EXPECT_LE((lcr::leverage_scores(lcr::thin_svd(X)).ell - before).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Generate, SeedDeterminesData) {
  auto cfg = config(DesignKind::Gaussian, 30, 3);
  const auto a = lcr::lab::generate_problem(cfg);
  const auto b = lcr::lab::generate_problem(cfg);
  EXPECT_EQ(a.data.X(), b.data.X());
  EXPECT_EQ(a.data.y(), b.data.y());
  cfg.seed = 2;
  EXPECT_NE(lcr::lab::generate_problem(cfg).data.X(), a.data.X());
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig cfg = config(DesignKind::Coherent, 77, 3, 2);
  cfg.id = "round";
  cfg.kappa = 12.5;
  cfg.noise = 0.25;
  cfg.trials = 9;
  cfg.seed = 123456789012345ULL;
  cfg.r = 40;
  const nlohmann::json j = cfg;
  const auto back = j.get<ExperimentConfig>();
  EXPECT_EQ(nlohmann::json(back), j);
  EXPECT_EQ(back.design, DesignKind::Coherent);
  EXPECT_EQ(back.seed, cfg.seed);
}

TEST(Config, DesignNames) {
  EXPECT_EQ(lcr::lab::parse_design("gaussian"), DesignKind::Gaussian);
  EXPECT_EQ(lcr::lab::parse_design("hadamard"), DesignKind::HadamardUniform);
  EXPECT_EQ(lcr::lab::parse_design(lcr::lab::to_string(DesignKind::Coherent)), DesignKind::Coherent);
  EXPECT_EQ(code_of([] { lcr::lab::parse_design("uniformish"); }), lcr::ErrorCode::InvalidConfig);
}

TEST(Config, RejectsBadInput) {
  EXPECT_EQ(code_of([] { nlohmann::json{{"n", 10}, {"bogus", 1}}.get<ExperimentConfig>(); }),
            lcr::ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { nlohmann::json{{"n", "ten"}}.get<ExperimentConfig>(); }), lcr::ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { config(DesignKind::Gaussian, 5, 5).validate(); }), lcr::ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([] { config(DesignKind::HadamardUniform, 12, 2).validate(); }), lcr::ErrorCode::InvalidConfig);
  auto cfg = config(DesignKind::Gaussian, 20, 2);
  cfg.kappa = 0.5;
  EXPECT_EQ(code_of([&] { cfg.validate(); }), lcr::ErrorCode::InvalidConfig);
}

TEST(Config, LoadFromFile) {
  const std::string good = temp_path("good.json"), bad = temp_path("bad.json");
  std::ofstream(good) << R"({"id": "file", "n": 40, "d": 2, "design": "coherent", "seed": 9})";
  std::ofstream(bad) << R"({"n": 40, "d": )";
  const auto cfg = lcr::lab::load_config(good);
  EXPECT_EQ(cfg.id, "file");
  EXPECT_EQ(cfg.n, 40u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(code_of([&] { lcr::lab::load_config(bad); }), lcr::ErrorCode::ParseError);
  EXPECT_EQ(code_of([&] { lcr::lab::load_config(temp_path("missing.json")); }), lcr::ErrorCode::InvalidConfig);
  std::remove(good.c_str());
  std::remove(bad.c_str());
}

TEST(Verify, OnePointTightAtUniformLeverage) {
  const auto rep = lcr::lab::verify_one_point(config(DesignKind::HadamardUniform, 64, 4));
  ASSERT_NE(find(rep, "tight_at_uniform_leverage"), nullptr);
  EXPECT_TRUE(rep.passed()) << rep.dump();
}

TEST(Verify, OnePointConsistentHasZeroExpectedError) {
  auto cfg = config(DesignKind::Coherent, 60, 3);
  cfg.noise = 0;
  const auto rep = lcr::lab::verify_one_point(cfg);
  ASSERT_NE(find(rep, "consistent_expected_error_zero"), nullptr);
  EXPECT_TRUE(rep.passed()) << rep.dump();
}

TEST(Verify, OnePointGaussian) {
  const auto rep = lcr::lab::verify_one_point(config(DesignKind::Gaussian, 100, 5));
  EXPECT_TRUE(rep.passed()) << rep.dump();
  EXPECT_EQ(find(rep, "tight_at_uniform_leverage"), nullptr);
  EXPECT_EQ(code_of([] { lcr::lab::verify_one_point(config(DesignKind::Gaussian, 100, 5, 2)); }),
            lcr::ErrorCode::InvalidConfig);
}

TEST(Verify, KPointsExactSmall) {
  const auto rep = lcr::lab::verify_k_points(config(DesignKind::Gaussian, 12, 2, 2));
  ASSERT_NE(find(rep, "expectation_within_bound"), nullptr);
  EXPECT_TRUE(rep.passed()) << rep.dump();
  for (const auto& b : rep.bounds) {
    if (b.name == "bound_factor") {
      EXPECT_LE(b.value, 1.125 + 1e-12);
    }
  }
}

TEST(Verify, KPointsConsistentMonteCarlo) {
  auto cfg = config(DesignKind::Gaussian, 200, 2, 10);
  cfg.noise = 0;
  cfg.trials = 200;
  const auto rep = lcr::lab::verify_k_points(cfg);
  EXPECT_TRUE(rep.passed()) << rep.dump();
  EXPECT_EQ(code_of([] { lcr::lab::verify_k_points(config(DesignKind::Gaussian, 10, 2, 5)); }),
            lcr::ErrorCode::InvalidConfig);
}

TEST(Verify, UnknownExperiment) {
  EXPECT_EQ(code_of([] { lcr::lab::run_verification("nope", ExperimentConfig{}); }), lcr::ErrorCode::InvalidConfig);
}

TEST(Report, MeasurementsCarrySeedAndJsonShape) {
  auto cfg = config(DesignKind::Gaussian, 40, 2);
  cfg.seed = 77;
  lcr::lab::ExperimentReport rep("shape", cfg);
  rep.measure("a", 1.5, 0.25);
  rep.bound("b", 2.0, "two");
  rep.check("c", true, "ok");
  rep.timing_seconds.emplace_back("total", 0.1);
  const auto j = rep.to_json();
  EXPECT_EQ(j["measurements"][0]["seed"], 77);
  EXPECT_EQ(j["measurements"][0]["std_error"], 0.25);
  EXPECT_EQ(j["bounds"][0]["formula"], "two");
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_TRUE(j.contains("timing_seconds"));
  EXPECT_FALSE(rep.to_json(false).contains("timing_seconds"));
  rep.check("d", false);
  EXPECT_FALSE(rep.passed());
}

TEST(Report, DeterministicAcrossRunsAndThreads) {
  auto cfg = config(DesignKind::Gaussian, 10, 2, 2);
  cfg.trials = 3000;
  const std::string a = lcr::lab::verify_sampler(cfg, 1).dump(false);
  EXPECT_EQ(a, lcr::lab::verify_sampler(cfg, 1).dump(false));
  EXPECT_EQ(a, lcr::lab::verify_sampler(cfg, 3).dump(false));
  auto kcfg = config(DesignKind::Gaussian, 300, 3, 12);
  kcfg.trials = 100;
  EXPECT_EQ(lcr::lab::verify_k_points(kcfg, 1).dump(false), lcr::lab::verify_k_points(kcfg, 2).dump(false));
}
