#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "adjes/adjusted_es.hpp"
#include "adjes/errors.hpp"
#include "adjes/io.hpp"
#include "adjes/market_opt.hpp"
#include "adjes/quantile_model.hpp"
#include "adjes/risk_profile.hpp"
#include "adjes/series.hpp"
#include "adjes/ssd.hpp"

namespace py = pybind11;
using namespace adjes;

namespace {

py::dict solution_dict(const Solution& s) {
  py::dict d;
  d["value"] = s.value;
  d["shift"] = s.shift;
  d["loss"] = s.position.loss;
  d["prob"] = s.position.prob;
  d["density"] = s.position.density;
  d["state"] = s.position.state;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adjusted Expected Shortfall core";

  static py::exception<Error> error(m, "AdjesError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object type = py::reinterpret_borrow<py::object>(error.ptr());
      py::object exc = type(std::string(error_name(e.code())) + ": " + e.detail());
      exc.attr("code") = std::string(error_name(e.code()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<StepQuantile>(m, "StepQuantile")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("breakpoints"), py::arg("values"))
      .def_static("constant", &StepQuantile::constant)
      .def_static("from_samples",
                  [](const std::vector<double>& s) { return empirical_from_samples(s); }, py::arg("samples"))
      .def_static("from_weighted_samples",
                  [](const std::vector<double>& s, const std::vector<double>& w) {
                    return empirical_from_samples(s, w);
                  },
                  py::arg("samples"), py::arg("weights"))
      .def_property_readonly("breakpoints",
                             [](const StepQuantile& q) {
                               return std::vector<double>(q.breakpoints().begin(), q.breakpoints().end());
                             })
      .def_property_readonly("values",
                             [](const StepQuantile& q) {
                               return std::vector<double>(q.values().begin(), q.values().end());
                             })
      .def("var", &StepQuantile::var)
      .def("es", &StepQuantile::es)
      .def("mean", &StepQuantile::mean)
      .def("shifted", &StepQuantile::shifted)
      .def("scaled", &StepQuantile::scaled)
      .def("__len__", &StepQuantile::size);

  m.def("gaussian_es", &gaussian_es, py::arg("mu"), py::arg("sigma"), py::arg("p"));
  m.def("gaussian_discretized",
        [](double mu, double sigma, std::size_t atoms) { return discretize(GaussianLoss(mu, sigma), atoms); },
        py::arg("mu"), py::arg("sigma"), py::arg("atoms") = kDefaultGaussianAtoms);

  py::class_<RiskProfile>(m, "RiskProfile")
      .def_static("piecewise_constant", &RiskProfile::piecewise_constant, py::arg("levels"),
                  py::arg("thresholds"))
      .def_static("benchmark_es", &RiskProfile::benchmark_es, py::arg("z"))
      .def_static("hyperbolic", &RiskProfile::hyperbolic, py::arg("scale"))
      .def_static("from_json", [](const std::string& text) { return profile_from_json(text); })
      .def("__call__", &RiskProfile::eval)
      .def("truncated", &RiskProfile::truncated)
      .def("scaled", &RiskProfile::scaled)
      .def_property_readonly("breakpoints", &RiskProfile::breakpoints)
      .def_property_readonly("profile_class", [](const RiskProfile& g) { return std::string(to_string(classify(g))); })
      .def_property_readonly("kind", [](const RiskProfile& g) { return std::string(to_string(g.kind())); });

  m.def("sum_profiles", [](const std::vector<RiskProfile>& gs) { return sum_profiles(gs); });

  m.def("adjusted_es",
        [](const StepQuantile& x, const RiskProfile& g) {
          const AdjustedESResult r = adjusted_es(x, g);
          return py::make_tuple(r.value, r.argmax_p);
        },
        py::arg("x"), py::arg("g"), "Returns (value, argmax_p).");
  m.def("is_acceptable", &is_acceptable, py::arg("x"), py::arg("g"), py::arg("tol") = 1e-12);
  m.def("homogeneity",
        [](const RiskProfile& g) {
          const HomogeneityResult h = homogeneity_analysis(g);
          return py::make_tuple(h.homogeneous, h.level);
        });
  m.def("benchmark_from_es_profile", &benchmark_from_es_profile);

  m.def("ssd_dominates", &ssd_dominates, py::arg("x"), py::arg("z"), py::arg("tol") = 1e-12);
  m.def("ssd_based_risk", &ssd_based_risk, py::arg("x"), py::arg("z"));

  py::class_<MarketModel>(m, "MarketModel")
      .def(py::init([](const std::vector<std::pair<double, double>>& pq) {
             std::vector<MarketState> states;
             for (const auto& [p, q] : pq) states.push_back({p, q});
             return MarketModel(states);
           }),
           py::arg("states"), "States as (p, q) pairs.")
      .def_static("from_json", [](const std::string& text) { return market_from_json(text); })
      .def("__len__", &MarketModel::size);

  m.def("solve_problem_A",
        [](const MarketModel& mk, const RiskProfile& g, double w, double x) {
          return solution_dict(solve_problem_A(mk, g, w, x));
        },
        py::arg("market"), py::arg("g"), py::arg("w"), py::arg("x"));
  m.def("solve_problem_B",
        [](const MarketModel& mk, const RiskProfile& g, double w, double x) {
          return solution_dict(solve_problem_B(mk, g, w, x));
        },
        py::arg("market"), py::arg("g"), py::arg("w"), py::arg("x"));

  m.def("rolling_report",
        [](const std::vector<std::string>& dates, const std::vector<double>& losses, const RiskProfile& g,
           std::size_t window, std::size_t smooth) {
          SeriesConfig config;
          config.window = window;
          config.smooth = smooth;
          config.level = reference_level(g);
          py::list out;
          for (const ReportRow& r : rolling_report(LossSeries{dates, losses}, g, config)) {
            out.append(py::make_tuple(r.date, r.var_p, r.es_p, r.adj_es, r.argmax_p));
          }
          return out;
        },
        py::arg("dates"), py::arg("losses"), py::arg("g"), py::arg("window") = 250, py::arg("smooth") = 0);
}
