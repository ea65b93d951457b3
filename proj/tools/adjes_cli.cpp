// adjes: adjusted Expected Shortfall from the command line.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adjes/adjusted_es.hpp"
#include "adjes/errors.hpp"
#include "adjes/io.hpp"
#include "adjes/market_opt.hpp"
#include "adjes/series.hpp"
#include "adjes/ssd.hpp"

namespace {

using namespace adjes;

struct ComputeArgs {
  std::string input;
  std::string mode = "returns";
  std::size_t window = 250;
  std::size_t smooth = 0;
  std::string profile;
  std::string out;
  double level = -1.0;
  std::size_t atoms = kDefaultGaussianAtoms;
  std::vector<double> gaussian;
};

struct SsdArgs {
  std::string x;
  std::string z;
  std::string mode = "losses";
  double tol = 1e-12;
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path + "'");
  f << text;
}

int run_compute(const ComputeArgs& a) {
  const RiskProfile g = profile_from_json(read_file(a.profile));
  std::ostringstream out;
  if (!a.gaussian.empty()) {
    if (a.gaussian.size() != 2) {
      throw Error(ErrorCode::InvalidArgument, "--gaussian takes MU,SIGMA");
    }
    const GaussianLoss x(a.gaussian[0], a.gaussian[1]);
    const AdjustedESResult r = adjusted_es(x, g, a.atoms);
    out << "adj_es: " << format_number(r.value) << "\n"
        << "argmax_p: " << format_number(r.argmax_p) << "\n"
        << "discretized: " << (r.discretized ? "true" : "false") << ", atoms: " << a.atoms
        << "\n";
    emit(a.out, out.str());
    return 0;
  }
  if (a.input.empty()) throw Error(ErrorCode::InvalidArgument, "--input is required");
  const LossSeries series = ingest_file(a.input, parse_mode(a.mode));
  SeriesConfig config;
  config.window = a.window;
  config.smooth = a.smooth;
  config.level = a.level >= 0.0 ? a.level : reference_level(g);
  write_report(out, rolling_report(series, g, config));
  emit(a.out, out.str());
  return 0;
}

StepQuantile full_sample(const std::string& path, SeriesMode mode) {
  return empirical_from_samples(ingest_file(path, mode).losses);
}

int run_check_ssd(const SsdArgs& a) {
  const SeriesMode mode = parse_mode(a.mode);
  const SsdReport r = ssd_report(full_sample(a.x, mode), full_sample(a.z, mode), a.tol);
  std::cout << "dominates: " << (r.dominates ? "true" : "false")
            << ", risk: " << format_number(r.risk);
  if (r.violation_from) std::cout << ", violation_from: " << format_number(*r.violation_from);
  std::cout << "\n";
  return 0;
}

int run_classify(const std::string& path) {
  const RiskProfile g = profile_from_json(read_file(path));
  const HomogeneityResult h = homogeneity_analysis(g);
  std::cout << "class: " << to_string(classify(g))
            << ", homogeneous: " << (h.homogeneous ? "true" : "false");
  if (h.homogeneous) std::cout << ", level: " << format_number(h.level);
  std::cout << "\n";
  return 0;
}

int run_optimize(const std::string& market_path, const std::string& request_path,
                 const std::string& out_path) {
  const MarketModel market = market_from_json(read_file(market_path));
  const SolverRequest req = request_from_json(read_file(request_path));
  Solution s = [&] {
    switch (req.problem) {
      case 'A': return solve_problem_A(market, req.profile, req.w, req.x);
      case 'B': return solve_problem_B(market, req.profile, req.w, req.x);
      case 'C': return solve_problem_C(market, req.profile, req.w, req.x, *req.utility);
      case 'D': return solve_problem_D(market, req.profile, req.w, req.x, *req.utility);
      default: return solve_problem_E(market, req.profile, req.x, *req.spectral);
    }
  }();
  std::ostringstream out;
  out << "problem: " << req.problem << "\n"
      << "value: " << format_number(s.value) << "\n"
      << "shift: " << format_number(s.shift) << "\n"
      << "state,prob,density,loss\n";
  for (std::size_t k = 0; k < s.position.size(); ++k) {
    out << s.position.state[k] << ',' << format_number(s.position.prob[k]) << ','
        << format_number(s.position.density[k]) << ',' << format_number(s.position.loss[k])
        << "\n";
  }
  emit(out_path, out.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adjusted Expected Shortfall toolkit"};
  app.require_subcommand(1);

  ComputeArgs compute;
  auto* c = app.add_subcommand("compute", "Rolling-window VaR, ES and adjusted ES of a series");
  c->add_option("--input", compute.input, "CSV file with header date,value");
  c->add_option("--mode", compute.mode, "returns, losses or prices")
      ->check(CLI::IsMember({"returns", "losses", "prices"}));
  c->add_option("--window", compute.window, "Rolling window length");
  c->add_option("--smooth", compute.smooth, "Trailing average length (0 = off)");
  c->add_option("--profile", compute.profile, "Risk profile JSON")->required();
  c->add_option("--out", compute.out, "Output file (default stdout)");
  c->add_option("--level", compute.level, "Level of the var/es columns (default: first threshold)");
  c->add_option("--atoms", compute.atoms, "Atoms for Gaussian discretization");
  c->add_option("--gaussian", compute.gaussian, "Evaluate N(MU, SIGMA^2) instead of a series")
      ->delimiter(',')
      ->expected(2);

  SsdArgs ssd;
  auto* s = app.add_subcommand("check-ssd", "Second-order dominance of X over Z");
  s->add_option("--x", ssd.x, "CSV for X")->required();
  s->add_option("--z", ssd.z, "CSV for Z")->required();
  s->add_option("--mode", ssd.mode, "returns, losses or prices")
      ->check(CLI::IsMember({"returns", "losses", "prices"}));
  s->add_option("--tol", ssd.tol, "Dominance tolerance");

  std::string profile_path;
  auto* k = app.add_subcommand("classify-profile", "Class and homogeneity of a profile");
  k->add_option("--profile", profile_path, "Risk profile JSON")->required();

  std::string market_path;
  std::string request_path;
  std::string opt_out;
  auto* o = app.add_subcommand("optimize", "Solve one of the market problems A-E");
  o->add_option("--market", market_path, "Market JSON")->required();
  o->add_option("--request", request_path, "Request JSON")->required();
  o->add_option("--out", opt_out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "ERROR InvalidArgument: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*c) return run_compute(compute);
    if (*s) return run_check_ssd(ssd);
    if (*k) return run_classify(profile_path);
    return run_optimize(market_path, request_path, opt_out);
  } catch (const Error& e) {
    std::cerr << "ERROR " << error_name(e.code()) << ": " << e.detail() << "\n";
    return is_numeric_condition(e.code()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << "ERROR Internal: " << e.what() << "\n";
    return 3;
  }
}
