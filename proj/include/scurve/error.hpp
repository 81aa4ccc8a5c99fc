#pragma once

#include <stdexcept>
#include <string>

namespace scurve {

/// Stable error codes. The numeric values are part of the CLI error JSON.
enum class ErrorCode : int {
  InvalidArgument = 1,
  EvaluationAtBranchPoint = 2,
  BranchCollision = 3,
  NoConvergence = 4,
  SingularJacobian = 5,
  IllConditionedPeriods = 6,
  QuadratureFailure = 7,
  DegeneratePeriodRatio = 8,
  EndpointCollision = 9,
  ContinuationStalled = 10,
  StepCollapse = 11,
  InconclusiveResolution = 12,
  NoSignChange = 13,
  Unclassified = 14,
  PrecisionExhausted = 15,
  DegenerateHankelMinor = 16,
  RootFindingStalled = 17,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EvaluationAtBranchPoint: return "EvaluationAtBranchPoint";
    case ErrorCode::BranchCollision: return "BranchCollision";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::IllConditionedPeriods: return "IllConditionedPeriods";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::DegeneratePeriodRatio: return "DegeneratePeriodRatio";
    case ErrorCode::EndpointCollision: return "EndpointCollision";
    case ErrorCode::ContinuationStalled: return "ContinuationStalled";
    case ErrorCode::StepCollapse: return "StepCollapse";
    case ErrorCode::InconclusiveResolution: return "InconclusiveResolution";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::Unclassified: return "Unclassified";
    case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
    case ErrorCode::DegenerateHankelMinor: return "DegenerateHankelMinor";
    case ErrorCode::RootFindingStalled: return "RootFindingStalled";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace scurve
