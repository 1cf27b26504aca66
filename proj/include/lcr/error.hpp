#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcr {

enum class ErrorCode {
  ZeroRow,
  RankDeficient,
  MissingLabels,
  SingularDeficientSystem,
  DegenerateDistribution,
  InvalidK,
  NonpositiveWeight,
  TrialBudgetExceeded,
  TooLarge,
  PreconditionNotMet,
  InvalidDimension,
  DimensionMismatch,
  SketchRankDeficient,
  InconsistentSystem,
  InvalidConfig,
  ParseError,
};

inline constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::MissingLabels: return "MissingLabels";
    case ErrorCode::SingularDeficientSystem: return "SingularDeficientSystem";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::NonpositiveWeight: return "NonpositiveWeight";
    case ErrorCode::TrialBudgetExceeded: return "TrialBudgetExceeded";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SketchRankDeficient: return "SketchRankDeficient";
    case ErrorCode::InconsistentSystem: return "InconsistentSystem";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// All library failures are reported as an Error carrying a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace lcr
