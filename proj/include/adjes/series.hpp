#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "adjes/risk_profile.hpp"

namespace adjes {

enum class SeriesMode { Returns, Losses, Prices };

SeriesMode parse_mode(std::string_view name);

struct LossSeries {
  std::vector<std::string> dates;
  std::vector<double> losses;
};

/// Reads "date,value" CSV with ISO dates in strictly increasing order.
///
/// returns: loss = -value; losses: loss = value; prices: loss = -ln(P_t / P_{t-1}),
/// dated at t.
LossSeries ingest(std::istream& in, SeriesMode mode);
LossSeries ingest_file(const std::string& path, SeriesMode mode);

struct SeriesConfig {
  std::size_t window = 250;
  /// Trailing average length; 0 and 1 leave rows unchanged.
  std::size_t smooth = 0;
  /// Reference level for the var/es columns.
  double level = 0.95;
};

struct ReportRow {
  std::string date;
  double var_p;
  double es_p;
  double adj_es;
  double argmax_p;
};

/// First breakpoint of g below 1, the natural reference level for a
/// threshold profile; throws InvalidArgument when g has none.
double reference_level(const RiskProfile& g);

/// Row t uses the `window` losses ending at t (inclusive).
std::vector<ReportRow> rolling_report(const LossSeries& series, const RiskProfile& g,
                                      const SeriesConfig& config);

void write_report(std::ostream& out, const std::vector<ReportRow>& rows);

}  // namespace adjes
