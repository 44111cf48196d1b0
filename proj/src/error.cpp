#include "uwcrb/error.hpp"

namespace uwcrb {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::NoSignChange: return "NoSignChange";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::IllConditionedBasis: return "IllConditionedBasis";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TurningPointInsidePath: return "TurningPointInsidePath";
    case ErrorCode::TargetBelowMinimum: return "TargetBelowMinimum";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::DegenerateVerticalRay: return "DegenerateVerticalRay";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::SingularGram: return "SingularGram";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TooManyFailures: return "TooManyFailures";
    case ErrorCode::InfeasibleGeometry: return "InfeasibleGeometry";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace uwcrb
