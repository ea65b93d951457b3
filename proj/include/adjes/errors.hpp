#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace adjes {

enum class ErrorCode {
  EmptySample,
  BadWeights,
  OutOfRangeLevel,
  UnboundedQuantile,
  InvalidQuantile,
  InvalidArgument,
  InvalidProfile,
  NotESClass,
  NotVaRClass,
  ArgmaxAtOne,
  BadAllocation,
  ProfileNotNormalized,
  ProfileNotFlatBelowP,
  InvalidMarket,
  IncompatibleAtoms,
  TargetUnreachable,
  GridTooLarge,
  ParseError,
  NonMonotoneDates,
  WindowTooLong,
};

std::string_view error_name(ErrorCode code) noexcept;

// True for errors caused by a numeric condition rather than malformed input.
bool is_numeric_condition(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace adjes
