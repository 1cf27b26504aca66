#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "lcr/error.hpp"

namespace lcr::lab {

enum class DesignKind { Gaussian, HadamardUniform, Coherent };

inline std::string to_string(DesignKind kind) {
  switch (kind) {
    case DesignKind::Gaussian: return "gaussian";
    case DesignKind::HadamardUniform: return "hadamard-uniform";
    case DesignKind::Coherent: return "coherent";
  }
  return "unknown";
}

inline DesignKind parse_design(const std::string& s) {
  if (s == "gaussian") return DesignKind::Gaussian;
  if (s == "hadamard-uniform" || s == "hadamard") return DesignKind::HadamardUniform;
  if (s == "coherent") return DesignKind::Coherent;
  fail(ErrorCode::InvalidConfig, "unknown design '" + s + "'");
}

struct ExperimentConfig {
  std::string id = "experiment";
  std::size_t n = 100;
  std::size_t d = 5;
  std::size_t k = 1;
  DesignKind design = DesignKind::Gaussian;
  double spike_fraction = 0.1;  ///< coherent design only
  double kappa = 1.0;           ///< > 1 replaces the spectrum by log-spaced values in [1/kappa, 1]
  double noise = 1.0;
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::size_t r = 0;  ///< sketch dimension override, 0 = per-experiment default
  std::string out;

  void validate() const {
    auto bad = [](const std::string& m) { fail(ErrorCode::InvalidConfig, m); };
    if (d < 1) bad("d must be >= 1");
    if (n <= d) bad("n must exceed d");
    if (k < 1 || k >= n) bad("k must satisfy 1 <= k < n");
    if (design == DesignKind::HadamardUniform && (n & (n - 1)) != 0)
      bad("hadamard-uniform design needs n to be a power of two");
    if (design == DesignKind::Coherent && !(spike_fraction > 0.0 && spike_fraction < 1.0))
      bad("spike_fraction must lie in (0, 1)");
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) bad("kappa must be finite and >= 1");
    if (!(noise >= 0.0) || !std::isfinite(noise)) bad("noise must be finite and >= 0");
    if (trials < 1) bad("trials must be >= 1");
  }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = nlohmann::json{{"id", c.id},
                     {"n", c.n},
                     {"d", c.d},
                     {"k", c.k},
                     {"design", to_string(c.design)},
                     {"spike_fraction", c.spike_fraction},
                     {"kappa", c.kappa},
                     {"noise", c.noise},
                     {"trials", c.trials},
                     {"seed", c.seed},
                     {"r", c.r},
                     {"out", c.out}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) fail(ErrorCode::InvalidConfig, "config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const auto& v = it.value();
    try {
      if (key == "id") c.id = v.get<std::string>();
      else if (key == "n") c.n = v.get<std::size_t>();
      else if (key == "d") c.d = v.get<std::size_t>();
      else if (key == "k") c.k = v.get<std::size_t>();
      else if (key == "design") c.design = parse_design(v.get<std::string>());
      else if (key == "spike_fraction") c.spike_fraction = v.get<double>();
      else if (key == "kappa") c.kappa = v.get<double>();
      else if (key == "noise") c.noise = v.get<double>();
      else if (key == "trials") c.trials = v.get<std::size_t>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "r") c.r = v.get<std::size_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::InvalidConfig, "bad value for '" + key + "': " + e.what());
    }
  }
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::InvalidConfig, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::ParseError, path + ": " + e.what());
  }
  return j.get<ExperimentConfig>();
}

}  // namespace lcr::lab
