#pragma once

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcr/lab/config.hpp"
#include "lcr/version.hpp"

namespace lcr::lab {

struct Measurement {
  std::string name;
  double value = 0;
  std::uint64_t seed = 0;
  std::optional<double> std_error;
};

struct BoundValue {
  std::string name;
  double value = 0;
  std::string formula;
};

struct CriterionResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentReport {
  ExperimentReport() = default;
  ExperimentReport(std::string name, ExperimentConfig cfg) : experiment(std::move(name)), config(std::move(cfg)) {}

  std::string experiment;
  ExperimentConfig config;
  std::string library_version = lcr::library_version();
  std::vector<Measurement> measurements;
  std::vector<BoundValue> bounds;
  std::vector<CriterionResult> criteria;
  nlohmann::json series = nlohmann::json::object();
  std::vector<std::pair<std::string, double>> timing_seconds;

  void measure(std::string name, double value, std::optional<double> se = std::nullopt) {
    measurements.push_back({std::move(name), value, config.seed, se});
  }
  void bound(std::string name, double value, std::string formula) {
    bounds.push_back({std::move(name), value, std::move(formula)});
  }
  bool check(std::string name, bool ok, std::string detail = {}) {
    criteria.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  }
  bool passed() const {
    for (const auto& c : criteria)
      if (!c.passed) return false;
    return true;
  }

  nlohmann::json to_json(bool include_timing = true) const {
    nlohmann::json j;
    j["experiment"] = experiment;
    j["config"] = config;
    j["library_version"] = library_version;
    auto& m = j["measurements"] = nlohmann::json::array();
    for (const auto& x : measurements) {
      nlohmann::json e{{"name", x.name}, {"value", x.value}, {"seed", x.seed}};
      if (x.std_error) e["std_error"] = *x.std_error;
      m.push_back(std::move(e));
    }
    auto& b = j["bounds"] = nlohmann::json::array();
    for (const auto& x : bounds) b.push_back({{"name", x.name}, {"value", x.value}, {"formula", x.formula}});
    auto& c = j["criteria"] = nlohmann::json::array();
    for (const auto& x : criteria) c.push_back({{"name", x.name}, {"passed", x.passed}, {"detail", x.detail}});
    j["passed"] = passed();
    if (!series.empty()) j["series"] = series;
    if (include_timing) {
      auto& t = j["timing_seconds"] = nlohmann::json::object();
      for (const auto& [k, v] : timing_seconds) t[k] = v;
    }
    return j;
  }

  std::string dump(bool include_timing = true) const { return to_json(include_timing).dump(2) + "\n"; }
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace lcr::lab
