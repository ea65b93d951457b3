#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adjes/errors.hpp"
#include "adjes/io.hpp"
#include "adjes/series.hpp"
#include "test_support.hpp"

namespace adjes {
namespace {

namespace fs = std::filesystem;

const std::string kData = ADJES_DATA_DIR;

std::string data(const std::string& name) { return kData + "/" + name; }

RiskProfile threshold_profile() { return profile_from_json(read_file(data("profile_threshold.json"))); }

LossSeries ingest_text(const std::string& text, SeriesMode mode) {
  std::istringstream in(text);
  return ingest(in, mode);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

CliRun run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / ("adjes_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const fs::path out = dir / ("out" + std::to_string(counter));
  const fs::path err = dir / ("err" + std::to_string(counter++));
  const std::string cmd = std::string(ADJES_CLI_PATH) + " " + args + " >" + out.string() + " 2>" +
                          err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST(Ingest, Examples) {
  const LossSeries r = ingest_text("date,value\n2020-01-01,0.01\n2020-01-02,-0.02\n", SeriesMode::Returns);
  EXPECT_EQ(r.losses, (std::vector<double>{-0.01, 0.02}));
  EXPECT_EQ(r.dates, (std::vector<std::string>{"2020-01-01", "2020-01-02"}));

  const LossSeries flat = ingest_text("date,value\n2020-01-01,100\n2020-01-02,100\n", SeriesMode::Prices);
  ASSERT_EQ(flat.losses.size(), 1u);
  EXPECT_EQ(flat.losses[0], 0.0);
  EXPECT_EQ(flat.dates[0], "2020-01-02");

  const LossSeries drop = ingest_text("Date , Value\n2020-01-01,100\n2020-01-02,90\n", SeriesMode::Prices);
  EXPECT_NEAR(drop.losses[0], 0.1053605156578263, 1e-15);

  const LossSeries losses = ingest_text("date,value\n2020-01-01,1.5\n\n2020-01-03,-2\n", SeriesMode::Losses);
  EXPECT_EQ(losses.losses, (std::vector<double>{1.5, -2.0}));
}

TEST(Ingest, Errors) {
  EXPECT_EQ(code_of([] { ingest_text("when,value\n", SeriesMode::Losses); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { ingest_text("", SeriesMode::Losses); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { ingest_text("date,value\n2020-01-01,1x\n", SeriesMode::Losses); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { ingest_text("date,value\n2020-13-01,1\n", SeriesMode::Losses); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { ingest_text("date,value\n2020-01-01,1,2\n", SeriesMode::Losses); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { ingest_text("date,value\n2020-01-01,nan\n", SeriesMode::Losses); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { ingest_text("date,value\n2020-01-01,0\n", SeriesMode::Prices); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { ingest_text("date,value\n2020-01-02,1\n2020-01-02,1\n", SeriesMode::Losses); }),
            ErrorCode::NonMonotoneDates);
  EXPECT_EQ(code_of([] { ingest_text("date,value\n2020-01-02,1\n2020-01-01,1\n", SeriesMode::Losses); }),
            ErrorCode::NonMonotoneDates);
  try {
    ingest_file(data("bad_value.csv"), SeriesMode::Returns);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { parse_mode("yields"); }), ErrorCode::InvalidArgument);
}

TEST(RollingReport, ThresholdProfileIdentity) {
  const RiskProfile g = threshold_profile();
  const LossSeries series = ingest_file(data("index_returns.csv"), SeriesMode::Returns);
  for (std::size_t window : {60u, 250u}) {
    SeriesConfig config;
    config.window = window;
    config.level = reference_level(g);
    EXPECT_EQ(config.level, 0.95);
    const auto rows = rolling_report(series, g, config);
    ASSERT_EQ(rows.size(), series.losses.size() - window + 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const std::span<const double> win(series.losses.data() + i, window);
      testing::AtomTail tail(empirical_from_samples(win));
      const double e95 = tail.es(0.95);
      const double expected = std::max(e95, tail.es(0.99) - 0.01);
      EXPECT_NEAR(rows[i].adj_es, expected, 1e-12);
      EXPECT_GE(rows[i].adj_es, rows[i].es_p);
      EXPECT_NEAR(rows[i].es_p, e95, 1e-12);
      EXPECT_EQ(rows[i].date, series.dates[i + window - 1]);
    }
  }
}

TEST(RollingReport, ConstantSeriesAndSmoothing) {
  const RiskProfile g = threshold_profile();
  LossSeries series;
  for (int d = 1; d <= 9; ++d) {
    series.dates.push_back("2021-01-0" + std::to_string(d));
    series.losses.push_back(0.02);
  }
  SeriesConfig config;
  config.window = 4;
  config.level = 0.95;
  const auto rows = rolling_report(series, g, config);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.var_p, 0.02);
    EXPECT_EQ(row.es_p, 0.02);
    EXPECT_EQ(row.adj_es, 0.02);
  }

  const LossSeries real = ingest_file(data("index_returns.csv"), SeriesMode::Returns);
  SeriesConfig plain;
  plain.window = 100;
  plain.level = 0.95;
  SeriesConfig one = plain;
  one.smooth = 1;
  const auto a = rolling_report(real, g, plain);
  const auto b = rolling_report(real, g, one);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].adj_es, b[i].adj_es);
    EXPECT_EQ(a[i].es_p, b[i].es_p);
  }

  SeriesConfig five = plain;
  five.smooth = 5;
  const auto c = rolling_report(real, g, five);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::size_t first = i >= 4 ? i - 4 : 0;
    double sum = 0.0;
    for (std::size_t j = first; j <= i; ++j) sum += a[j].adj_es;
    EXPECT_NEAR(c[i].adj_es, sum / static_cast<double>(i - first + 1), 1e-14);
    EXPECT_EQ(c[i].argmax_p, a[i].argmax_p);
  }
}

TEST(RollingReport, Errors) {
  const RiskProfile g = threshold_profile();
  const LossSeries series = ingest_file(data("small_returns.csv"), SeriesMode::Returns);
  SeriesConfig config;
  config.window = 4;
  config.level = 0.95;
  EXPECT_EQ(code_of([&] { rolling_report(series, g, config); }), ErrorCode::WindowTooLong);
  config.window = 1;
  EXPECT_EQ(code_of([&] { rolling_report(series, g, config); }), ErrorCode::InvalidArgument);
  config.window = 2;
  config.smooth = 10;
  EXPECT_EQ(code_of([&] { rolling_report(series, g, config); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { reference_level(RiskProfile::hyperbolic(1.0)); }), ErrorCode::InvalidArgument);
}

TEST(RollingReport, WindowSlideTouchesOnlyReachedRows) {
  const RiskProfile g = threshold_profile();
  const LossSeries base = ingest_file(data("index_returns.csv"), SeriesMode::Returns);
  LossSeries slid;
  slid.dates.assign(base.dates.begin() + 1, base.dates.end());
  slid.losses.assign(base.losses.begin() + 1, base.losses.end());
  slid.dates.push_back("2099-01-01");
  slid.losses.push_back(base.losses.back());
  SeriesConfig config;
  config.window = 50;
  config.level = 0.95;
  const auto a = rolling_report(base, g, config);
  const auto b = rolling_report(slid, g, config);
  ASSERT_EQ(a.size(), b.size());
  // Row i of the slid series covers row i + 1 of the original.
  for (std::size_t i = 0; i + 1 < a.size(); ++i) EXPECT_EQ(b[i].adj_es, a[i + 1].adj_es);
}

TEST(Format, Numbers) {
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.75), "-0.75");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(1e-20), "1e-20");
}

TEST(Cli, ComputeReport) {
  const CliRun r = run_cli("compute --input " + data("index_returns.csv") + " --profile " +
                        data("profile_threshold.json") + " --window 250");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv(r.out);
  ASSERT_EQ(rows[0], (std::vector<std::string>{"date", "var_p1", "es_p1", "adj_es", "argmax_p"}));
  ASSERT_EQ(rows.size(), 800u - 250u + 2u);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 5u);
    EXPECT_GE(std::stod(rows[i][3]), std::stod(rows[i][2]));
  }
  const CliRun again = run_cli("compute --input " + data("index_returns.csv") + " --profile " +
                            data("profile_threshold.json") + " --window 250");
  EXPECT_EQ(r.out, again.out);
}

TEST(Cli, ComputePricesAndOutFile) {
  const fs::path out = fs::temp_directory_path() / "adjes_cli_prices.csv";
  const CliRun r = run_cli("compute --input " + data("index_prices.csv") + " --mode prices --window 60 --smooth 5 --profile " +
                        data("profile_threshold.json") + " --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(parse_csv(slurp(out)).size(), 299u - 60u + 2u);
}

TEST(Cli, ComputeGaussian) {
  const CliRun r = run_cli("compute --gaussian 0,0.5 --profile " + data("profile_hyperbolic.json") + " --atoms 1000");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("adj_es: "), std::string::npos);
  EXPECT_NE(r.out.find("discretized: true, atoms: 1000"), std::string::npos);
}

TEST(Cli, CheckSsd) {
  const CliRun same = run_cli("check-ssd --x " + data("index_returns.csv") + " --z " + data("index_returns.csv") +
                           " --mode returns");
  ASSERT_EQ(same.code, 0) << same.err;
  EXPECT_EQ(same.out, "dominates: true, risk: 0\n");
  const CliRun diff = run_cli("check-ssd --x " + data("small_returns.csv") + " --z " + data("index_returns.csv") +
                           " --mode returns");
  ASSERT_EQ(diff.code, 0) << diff.err;
  EXPECT_EQ(diff.out.rfind("dominates: false, risk: ", 0), 0u);
  EXPECT_NE(diff.out.find("violation_from: "), std::string::npos);
}

TEST(Cli, ClassifyProfile) {
  EXPECT_EQ(run_cli("classify-profile --profile " + data("profile_hyperbolic.json")).out,
            "class: VaR, homogeneous: false\n");
  EXPECT_EQ(run_cli("classify-profile --profile " + data("profile_es.json")).out,
            "class: General, homogeneous: true, level: 0.5\n");
  EXPECT_EQ(run_cli("classify-profile --profile " + data("profile_threshold.json")).out,
            "class: General, homogeneous: false\n");
}

TEST(Cli, Optimize) {
  const CliRun a = run_cli("optimize --market " + data("market_two_state.json") + " --request " + data("request_A.json"));
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, "problem: A\nvalue: -0.75\nshift: -0.75\nstate,prob,density,loss\n0,0.5,1.5,0.25\n1,0.5,0.5,-0.75\n");
  const CliRun c = run_cli("optimize --market " + data("market_two_state.json") + " --request " + data("request_C.json"));
  ASSERT_EQ(c.code, 0) << c.err;
  EXPECT_NE(c.out.find("value: 0.25\n"), std::string::npos);
  const CliRun e = run_cli("optimize --market " + data("market_two_state.json") + " --request " + data("request_E.json"));
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("value: 1\n"), std::string::npos);
}

TEST(Cli, ErrorsAndExitCodes) {
  const CliRun bad_profile = run_cli("classify-profile --profile " + data("profile_bad.json"));
  EXPECT_EQ(bad_profile.code, 2);
  EXPECT_EQ(bad_profile.err.rfind("ERROR InvalidProfile: ", 0), 0u) << bad_profile.err;

  const CliRun dates = run_cli("compute --input " + data("bad_dates.csv") + " --profile " + data("profile_threshold.json"));
  EXPECT_EQ(dates.code, 2);
  EXPECT_EQ(dates.err.rfind("ERROR NonMonotoneDates: ", 0), 0u) << dates.err;

  const CliRun value = run_cli("compute --input " + data("bad_value.csv") + " --profile " + data("profile_threshold.json"));
  EXPECT_EQ(value.code, 2);
  EXPECT_EQ(value.err.rfind("ERROR ParseError: line 3", 0), 0u) << value.err;

  const CliRun window = run_cli("compute --input " + data("small_returns.csv") + " --profile " + data("profile_threshold.json"));
  EXPECT_EQ(window.code, 2);
  EXPECT_EQ(window.err.rfind("ERROR WindowTooLong: ", 0), 0u) << window.err;

  const CliRun usage = run_cli("compute --window 10");
  EXPECT_EQ(usage.code, 2);
  EXPECT_EQ(usage.err.rfind("ERROR InvalidArgument: ", 0), 0u) << usage.err;
  EXPECT_EQ(run_cli("frobnicate").code, 2);

  const fs::path req = fs::temp_directory_path() / "adjes_unreachable.json";
  std::ofstream(req) << R"({"problem":"C","x":0.5,"profile":{"kind":"benchmark_es","quantile":{"breakpoints":[0.5,1.0],"values":[0.0,1.0]}},"utility":{"kinks":[0.0],"slopes":[1.0,0.0]}})";
  const CliRun unreachable = run_cli("optimize --market " + data("market_two_state.json") + " --request " + req.string());
  EXPECT_EQ(unreachable.code, 3);
  EXPECT_EQ(unreachable.err.rfind("ERROR TargetUnreachable: ", 0), 0u) << unreachable.err;

  const CliRun missing = run_cli("classify-profile --profile /nonexistent/profile.json");
  EXPECT_EQ(missing.code, 2);
  EXPECT_EQ(missing.err.rfind("ERROR InvalidArgument: ", 0), 0u) << missing.err;
}

}  // namespace
}  // namespace adjes
