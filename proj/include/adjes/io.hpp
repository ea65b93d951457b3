#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "adjes/market_opt.hpp"
#include "adjes/risk_profile.hpp"

namespace adjes {

// JSON readers. Malformed documents raise ParseError; schema violations raise
// InvalidProfile / InvalidMarket / InvalidArgument naming the field.

RiskProfile profile_from_json(std::string_view text);
MarketModel market_from_json(std::string_view text);

struct SolverRequest {
  char problem;
  double w;
  double x;
  RiskProfile profile;
  std::optional<UtilityFn> utility;
  std::optional<SpectralFunctional> spectral;
};

SolverRequest request_from_json(std::string_view text);

std::string read_file(const std::string& path);

/// %.12g with negative zero printed as 0.
std::string format_number(double v);

}  // namespace adjes
