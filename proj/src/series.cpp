#include "adjes/series.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>

#include "adjes/adjusted_es.hpp"
#include "adjes/errors.hpp"
#include "adjes/io.hpp"

namespace adjes {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  while (!s.empty() && !not_space(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && !not_space(static_cast<unsigned char>(s[i]))) ++i;
  return s.substr(i);
}

bool iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9}) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  const int month = std::stoi(s.substr(5, 2));
  const int day = std::stoi(s.substr(8, 2));
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

[[noreturn]] void parse_error(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

}  // namespace

SeriesMode parse_mode(std::string_view name) {
  if (name == "returns") return SeriesMode::Returns;
  if (name == "losses") return SeriesMode::Losses;
  if (name == "prices") return SeriesMode::Prices;
  throw Error(ErrorCode::InvalidArgument,
              "mode must be returns, losses or prices, got '" + std::string(name) + "'");
}

LossSeries ingest(std::istream& in, SeriesMode mode) {
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<std::string> dates;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      std::string lower;
      for (char c : line) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
          lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        }
      }
      if (lower != "date,value") parse_error(lineno, "expected header 'date,value'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
      parse_error(lineno, "expected two comma-separated fields");
    }
    const std::string date = trim(line.substr(0, comma));
    const std::string text = trim(line.substr(comma + 1));
    if (!iso_date(date)) parse_error(lineno, "date '" + date + "' is not YYYY-MM-DD");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE ||
        !std::isfinite(v)) {
      parse_error(lineno, "value '" + text + "' is not a finite decimal");
    }
    if (!dates.empty() && !(date > dates.back())) {
      throw Error(ErrorCode::NonMonotoneDates,
                  "line " + std::to_string(lineno) + ": " + date + " does not follow " +
                      dates.back());
    }
    if (mode == SeriesMode::Prices && !(v > 0.0)) {
      parse_error(lineno, "price must be positive");
    }
    dates.push_back(date);
    values.push_back(v);
  }
  if (!header) parse_error(lineno, "missing header 'date,value'");

  LossSeries out;
  if (mode == SeriesMode::Prices) {
    for (std::size_t t = 1; t < values.size(); ++t) {
      out.dates.push_back(dates[t]);
      out.losses.push_back(-std::log(values[t] / values[t - 1]));
    }
  } else {
    out.dates = std::move(dates);
    out.losses = std::move(values);
    if (mode == SeriesMode::Returns) {
      for (double& v : out.losses) v = -v;
    }
  }
  return out;
}

LossSeries ingest_file(const std::string& path, SeriesMode mode) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return ingest(in, mode);
}

double reference_level(const RiskProfile& g) {
  const double first = g.pieces().front().upto;
  if (first >= 1.0) {
    throw Error(ErrorCode::InvalidArgument, "profile has no threshold below 1; give a level");
  }
  return first;
}

std::vector<ReportRow> rolling_report(const LossSeries& series, const RiskProfile& g,
                                      const SeriesConfig& config) {
  if (config.window < 2) throw Error(ErrorCode::InvalidArgument, "window must be at least 2");
  if (series.losses.size() < config.window) {
    throw Error(ErrorCode::WindowTooLong, "window " + std::to_string(config.window) +
                                              " exceeds series length " +
                                              std::to_string(series.losses.size()));
  }
  if (config.smooth > series.losses.size()) {
    throw Error(ErrorCode::InvalidArgument, "smoothing length exceeds series length");
  }
  check_level(config.level);

  std::vector<ReportRow> rows;
  const std::span<const double> all(series.losses);
  for (std::size_t t = config.window; t <= all.size(); ++t) {
    const StepQuantile x = empirical_from_samples(all.subspan(t - config.window, config.window));
    const AdjustedESResult r = adjusted_es(x, g);
    rows.push_back({series.dates[t - 1], x.var(config.level), x.es(config.level), r.value,
                    r.argmax_p});
  }
  if (config.smooth > 1) {
    std::vector<ReportRow> raw = rows;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::size_t first = i + 1 >= config.smooth ? i + 1 - config.smooth : 0;
      const double n = static_cast<double>(i + 1 - first);
      double v = 0.0, e = 0.0, a = 0.0;
      for (std::size_t j = first; j <= i; ++j) {
        v += raw[j].var_p;
        e += raw[j].es_p;
        a += raw[j].adj_es;
      }
      rows[i].var_p = v / n;
      rows[i].es_p = e / n;
      rows[i].adj_es = a / n;
    }
  }
  return rows;
}

void write_report(std::ostream& out, const std::vector<ReportRow>& rows) {
  out << "date,var_p1,es_p1,adj_es,argmax_p\n";
  for (const auto& row : rows) {
    out << row.date << ',' << format_number(row.var_p) << ',' << format_number(row.es_p) << ','
        << format_number(row.adj_es) << ',' << format_number(row.argmax_p) << '\n';
  }
}

}  // namespace adjes
