#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pldeg {

enum class ErrorCode {
  InvalidInput,
  DegenerateSimplex,
  NonManifold,
  Disconnected,
  EmptyLevel,
  NotRegularValue,
  OnImageBoundary,
  NumericallyAmbiguous,
  SupportCrossesImageBoundary,
  InconsistentRegion,
  EmptyPreimage,
  CannotSeparate,
  BallTooSmall,
  HypothesisViolated,
  NonpositiveDeterminant,
  InfeasibleInitial,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::NonManifold: return "NonManifold";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::EmptyLevel: return "EmptyLevel";
    case ErrorCode::NotRegularValue: return "NotRegularValue";
    case ErrorCode::OnImageBoundary: return "OnImageBoundary";
    case ErrorCode::NumericallyAmbiguous: return "NumericallyAmbiguous";
    case ErrorCode::SupportCrossesImageBoundary: return "SupportCrossesImageBoundary";
    case ErrorCode::InconsistentRegion: return "InconsistentRegion";
    case ErrorCode::EmptyPreimage: return "EmptyPreimage";
    case ErrorCode::CannotSeparate: return "CannotSeparate";
    case ErrorCode::BallTooSmall: return "BallTooSmall";
    case ErrorCode::HypothesisViolated: return "HypothesisViolated";
    case ErrorCode::NonpositiveDeterminant: return "NonpositiveDeterminant";
    case ErrorCode::InfeasibleInitial: return "InfeasibleInitial";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pldeg
