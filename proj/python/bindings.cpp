#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "driftbandit/bandit_glb.hpp"
#include "driftbandit/bandit_lb.hpp"
#include "driftbandit/bob.hpp"
#include "driftbandit/errors.hpp"
#include "driftbandit/harness.hpp"
#include "driftbandit/link_model.hpp"
#include "driftbandit/mdp.hpp"
#include "driftbandit/weighted_design.hpp"

namespace py = pybind11;
using namespace driftbandit;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Discounted bandit and episodic MDP simulator";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<DiscountedDesign>(m, "DiscountedDesign")
      .def(py::init<int, double, double>(), py::arg("d"), py::arg("gamma"), py::arg("lam"))
      .def("update", &DiscountedDesign::update, py::arg("x"), py::arg("r"))
      .def("ridge_estimate", &DiscountedDesign::ridge_estimate)
      .def("reset", &DiscountedDesign::reset)
      .def_property_readonly("V", &DiscountedDesign::V)
      .def_property_readonly("b", &DiscountedDesign::b)
      .def_property_readonly("weight_sum", &DiscountedDesign::weight_sum)
      .def_property_readonly("t", &DiscountedDesign::t);

  m.def(
      "lb_radius",
      [](double S, double L, double R, double delta, int d, double lam, double W) {
        return lb_radius(RadiusParams{S, L, R, delta, d}, lam, W);
      },
      py::arg("S"), py::arg("L"), py::arg("R"), py::arg("delta"), py::arg("d"), py::arg("lam"),
      py::arg("W"));
  m.def(
      "compute_c_mu",
      [](const std::string& link, double S, double L) {
        if (link != "logistic" && link != "identity") throw ConfigError("unknown link " + link);
        return compute_c_mu(link == "logistic" ? LinkKind::kLogistic : LinkKind::kIdentity, S, L);
      },
      py::arg("link"), py::arg("S"), py::arg("L"));
  m.def("optimal_gamma_lb", &optimal_gamma_lb, py::arg("d"), py::arg("T"), py::arg("P_T"));
  m.def(
      "bob_candidates",
      [](int d, long T) {
        const BobConfig c = bob_candidates(d, T);
        return py::dict(py::arg("delta") = c.delta, py::arg("N") = c.N,
                        py::arg("candidates") = c.candidates);
      },
      py::arg("d"), py::arg("T"));
  m.def("mnl_probs", &mnl_probs, py::arg("features"), py::arg("w"));
  m.def(
      "fit_loglog",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        const LogLogFit f = fit_loglog(x, y);
        return py::dict(py::arg("slope") = f.slope, py::arg("intercept") = f.intercept,
                        py::arg("r2") = f.r2);
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        ExperimentResult r;
        {
          py::gil_scoped_release release;
          r = run_experiment(parse_config(config_json));
        }
        std::ostringstream csv;
        write_csv(r, csv);
        std::ostringstream summary;
        write_summary(r, summary);
        return py::dict(py::arg("csv") = csv.str(), py::arg("summary") = summary.str());
      },
      py::arg("config_json"),
      "Runs an experiment from a JSON config; returns the CSV and summary JSON as text.");
  m.def("git_describe", &git_describe);
}
