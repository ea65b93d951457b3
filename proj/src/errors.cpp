#include "adjes/errors.hpp"

namespace adjes {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::BadWeights: return "BadWeights";
    case ErrorCode::OutOfRangeLevel: return "OutOfRangeLevel";
    case ErrorCode::UnboundedQuantile: return "UnboundedQuantile";
    case ErrorCode::InvalidQuantile: return "InvalidQuantile";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidProfile: return "InvalidProfile";
    case ErrorCode::NotESClass: return "NotESClass";
    case ErrorCode::NotVaRClass: return "NotVaRClass";
    case ErrorCode::ArgmaxAtOne: return "ArgmaxAtOne";
    case ErrorCode::BadAllocation: return "BadAllocation";
    case ErrorCode::ProfileNotNormalized: return "ProfileNotNormalized";
    case ErrorCode::ProfileNotFlatBelowP: return "ProfileNotFlatBelowP";
    case ErrorCode::InvalidMarket: return "InvalidMarket";
    case ErrorCode::IncompatibleAtoms: return "IncompatibleAtoms";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::GridTooLarge: return "GridTooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotoneDates: return "NonMonotoneDates";
    case ErrorCode::WindowTooLong: return "WindowTooLong";
  }
  return "Unknown";
}

bool is_numeric_condition(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnboundedQuantile:
    case ErrorCode::ArgmaxAtOne:
    case ErrorCode::IncompatibleAtoms:
    case ErrorCode::TargetUnreachable:
    case ErrorCode::GridTooLarge:
      return true;
    default:
      return false;
  }
}

}  // namespace adjes
