#include "adjes/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "adjes/errors.hpp"

namespace adjes {
namespace {

using nlohmann::json;

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

const json& field(const json& obj, const char* key, const std::string& path, ErrorCode code) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(code, "missing field '" + path + key + "'");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& name, ErrorCode code) {
  if (!v.is_number()) throw Error(code, "field '" + name + "' must be a number");
  return v.get<double>();
}

std::vector<double> numbers(const json& v, const std::string& name, ErrorCode code) {
  if (!v.is_array()) throw Error(code, "field '" + name + "' must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(number(v[i], name + "[" + std::to_string(i) + "]", code));
  }
  return out;
}

// Re-raise construction errors with the field they came from.
template <class F>
auto with_field(const std::string& name, ErrorCode code, F&& make) {
  try {
    return make();
  } catch (const Error& e) {
    throw Error(code, "field '" + name + "': " + e.detail());
  }
}

RiskProfile profile_from(const json& doc, const std::string& prefix) {
  constexpr ErrorCode bad = ErrorCode::InvalidProfile;
  if (!doc.is_object()) throw Error(bad, "profile must be a JSON object");
  const json& kind_v = field(doc, "kind", prefix, bad);
  if (!kind_v.is_string()) throw Error(bad, "field '" + prefix + "kind' must be a string");
  const std::string kind = kind_v.get<std::string>();

  std::optional<RiskProfile> g;
  if (kind == "piecewise_constant") {
    const json& pieces = field(doc, "pieces", prefix, bad);
    if (!pieces.is_array() || pieces.empty()) {
      throw Error(bad, "field '" + prefix + "pieces' must be a nonempty array");
    }
    std::vector<double> levels;
    std::vector<double> uptos;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const std::string at = prefix + "pieces[" + std::to_string(i) + "].";
      uptos.push_back(number(field(pieces[i], "upto", at, bad), at + "upto", bad));
      levels.push_back(number(field(pieces[i], "level", at, bad), at + "level", bad));
      if (!(uptos.back() > 0.0 && uptos.back() <= 1.0)) {
        throw Error(bad, "field '" + at + "upto' must lie in (0, 1]");
      }
      if (i > 0 && !(uptos[i] > uptos[i - 1])) {
        throw Error(bad, "field '" + at + "upto' must exceed the previous upto");
      }
      if (i > 0 && levels[i] < levels[i - 1]) {
        throw Error(bad, "field '" + at + "level' must not decrease");
      }
    }
    if (doc.contains("infinite_above")) {
      const double above = number(doc["infinite_above"], prefix + "infinite_above", bad);
      if (above != uptos.back()) {
        throw Error(bad, "field '" + prefix + "infinite_above' must equal the last upto");
      }
    }
    g = with_field(prefix + "pieces", bad,
                   [&] { return RiskProfile::piecewise_constant(levels, uptos); });
  } else if (kind == "benchmark_es") {
    const json& q = field(doc, "quantile", prefix, bad);
    const std::string at = prefix + "quantile.";
    auto bps = numbers(field(q, "breakpoints", at, bad), at + "breakpoints", bad);
    auto vals = numbers(field(q, "values", at, bad), at + "values", bad);
    g = with_field(prefix + "quantile", bad, [&] {
      return RiskProfile::benchmark_es(StepQuantile(std::move(bps), std::move(vals)));
    });
  } else if (kind == "hyperbolic") {
    const double scale = number(field(doc, "scale", prefix, bad), prefix + "scale", bad);
    g = with_field(prefix + "scale", bad, [&] { return RiskProfile::hyperbolic(scale); });
  } else {
    throw Error(bad, "field '" + prefix + "kind' has unknown value '" + kind + "'");
  }
  if (doc.contains("truncate_at")) {
    const double level = number(doc["truncate_at"], prefix + "truncate_at", bad);
    g = with_field(prefix + "truncate_at", bad, [&] { return g->truncated(level); });
  }
  return *g;
}

}  // namespace

RiskProfile profile_from_json(std::string_view text) { return profile_from(parse(text), ""); }

MarketModel market_from_json(std::string_view text) {
  constexpr ErrorCode bad = ErrorCode::InvalidMarket;
  const json doc = parse(text);
  const json& states = field(doc, "states", "", bad);
  if (!states.is_array()) throw Error(bad, "field 'states' must be an array");
  std::vector<MarketState> out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const std::string at = "states[" + std::to_string(i) + "].";
    out.push_back({number(field(states[i], "p", at, bad), at + "p", bad),
                   number(field(states[i], "q", at, bad), at + "q", bad)});
  }
  return MarketModel(std::move(out));
}

SolverRequest request_from_json(std::string_view text) {
  constexpr ErrorCode bad = ErrorCode::InvalidArgument;
  const json doc = parse(text);
  const json& problem = field(doc, "problem", "", bad);
  if (!problem.is_string() || problem.get<std::string>().size() != 1 ||
      std::string("ABCDE").find(problem.get<std::string>()[0]) == std::string::npos) {
    throw Error(bad, "field 'problem' must be one of A, B, C, D, E");
  }
  SolverRequest req{problem.get<std::string>()[0],
                    doc.contains("w") ? number(doc["w"], "w", bad) : 0.0,
                    number(field(doc, "x", "", bad), "x", bad),
                    profile_from(field(doc, "profile", "", ErrorCode::InvalidProfile), "profile."),
                    std::nullopt,
                    std::nullopt};
  if (doc.contains("utility")) {
    const json& u = doc["utility"];
    auto kinks = numbers(field(u, "kinks", "utility.", bad), "utility.kinks", bad);
    auto slopes = numbers(field(u, "slopes", "utility.", bad), "utility.slopes", bad);
    const double at_zero =
        u.contains("value_at_zero") ? number(u["value_at_zero"], "utility.value_at_zero", bad) : 0.0;
    req.utility = with_field("utility", bad, [&] {
      return UtilityFn(std::move(kinks), std::move(slopes), at_zero);
    });
  }
  if (doc.contains("spectral")) {
    const json& s = doc["spectral"];
    auto levels = numbers(field(s, "levels", "spectral.", bad), "spectral.levels", bad);
    auto weights = numbers(field(s, "weights", "spectral.", bad), "spectral.weights", bad);
    req.spectral = with_field("spectral", bad, [&] {
      return SpectralFunctional(std::move(levels), std::move(weights));
    });
  }
  if ((req.problem == 'C' || req.problem == 'D') && !req.utility) {
    throw Error(bad, "missing field 'utility' required by problem " + std::string(1, req.problem));
  }
  if (req.problem == 'E' && !req.spectral) {
    throw Error(bad, "missing field 'spectral' required by problem E");
  }
  return req;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace adjes
