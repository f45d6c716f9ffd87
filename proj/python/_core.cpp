#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "levytree/branching.hpp"
#include "levytree/coeffs.hpp"
#include "levytree/consistency.hpp"
#include "levytree/excursion.hpp"
#include "levytree/laws.hpp"
#include "levytree/simulate.hpp"
#include "levytree/stablefn.hpp"

namespace py = pybind11;
using namespace levytree;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Height and diameter of stable Levy trees";
  m.attr("__version__") = kVersion;

  // Domain and validation problems are caller errors; the rest are refusals or solver failures.
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<QuadratureError>(m, "QuadratureError", PyExc_RuntimeError);

  // excursion
  py::class_<PLExcursion>(m, "PLExcursion")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("t"), py::arg("h"))
      .def_readonly("t", &PLExcursion::t)
      .def_readonly("h", &PLExcursion::h)
      .def("lifetime", &PLExcursion::lifetime)
      .def("__call__", &PLExcursion::at);
  m.def("dist", [](const PLExcursion& H, double s, double t) { return dist(H, s, t); });
  m.def("total_height", [](const PLExcursion& H) {
    const auto r = total_height(H);
    return py::make_tuple(r.Gamma, r.tau);
  });
  m.def("diameter", [](const PLExcursion& H) {
    const auto r = diameter(H);
    return py::make_tuple(r.D, r.tau0, r.tau1);
  });
  m.def("reroot", &reroot, py::arg("H"), py::arg("t0"));
  m.def("max_abs_diff", [](const PLExcursion& a, const PLExcursion& b) { return max_abs_diff(a, b); });

  // branching and stable functions
  m.def("w", [](double y, double g) { return w(y, StableIndex(g)); }, py::arg("y"), py::arg("gamma"));
  m.def("v", [](double t, double g) { return v(t, StableIndex(g)); }, py::arg("t"), py::arg("gamma"));
  m.def("F", [](double x, double g) { return F(x, StableIndex(g)); }, py::arg("x"), py::arg("gamma"));
  m.def("s_gamma", [](double x, double g) { return s_gamma(x, g); }, py::arg("x"), py::arg("gamma"));
  m.def("theta", [](double x, double g) { return theta(x, g); }, py::arg("x"), py::arg("gamma"));
  m.def("xi", [](double r, double g) { return xi(r, g); }, py::arg("r"), py::arg("gamma"));
  m.def("xi_bar", [](double r, double g) { return xi_bar(r, g); }, py::arg("r"), py::arg("gamma"));

  // coefficients
  m.def("beta_coeffs", &beta_coeffs, py::arg("gamma"), py::arg("N"));
  m.def("gammadelta_coeffs", [](double g, int N) {
    const auto r = gammadelta_coeffs(g, N);
    return py::make_tuple(r.gamma_n, r.delta_n);
  }, py::arg("gamma"), py::arg("N"));
  m.def("C0", &C0, py::arg("gamma"));
  m.def("constants", [](double g) {
    const auto k = constants(g);
    py::dict d;
    d["C0"] = k.C0;
    d["C1"] = k.C1;
    d["C2"] = k.C2;
    d["lambda_cr"] = k.lambda_cr;
    d["C_small"] = k.C_small;
    d["Cprime_small"] = k.Cprime_small;
    return d;
  }, py::arg("gamma"));

  // laws
  m.def("nr_height_tail", [](double r, double g) { return nr_height_tail(r, g); }, py::arg("r"), py::arg("gamma"));
  m.def("nr_diam_tail", [](double r, double g) { return nr_diam_tail(r, g); }, py::arg("r"), py::arg("gamma"));
  m.def("nr_height_cdf", [](double r, double g) { return nr_height_cdf(r, g); }, py::arg("r"), py::arg("gamma"));
  m.def("nr_diam_cdf", [](double r, double g) { return nr_diam_cdf(r, g); }, py::arg("r"), py::arg("gamma"));
  m.def("L1", [](double y, double z, double g) { return L1(y, z, g); }, py::arg("y"), py::arg("z"), py::arg("gamma"));
  m.def("moments", [](double g) {
    const auto r = moments(g);
    py::dict d;
    d["mean_height"] = r.mean_height;
    d["mean_diam"] = r.mean_diam;
    d["ratio"] = r.ratio;
    return d;
  }, py::arg("gamma"));

  // simulation
  m.def("sample_tree", [](double g, int n, std::uint64_t seed, std::uint64_t index) {
    Rng rng(seed, index);
    return sample_conditioned_tree(OffspringLaw::for_gamma(g), n, rng);
  }, py::arg("gamma"), py::arg("n"), py::arg("seed"), py::arg("index") = 0,
        "Lukasiewicz sequence (child counts in depth-first order) of a conditioned tree with n vertices");
  m.def("height_and_diameter", [](const std::vector<int>& path) {
    const auto s = height_and_diameter(path);
    return py::make_tuple(s.height, s.diameter);
  }, py::arg("path"));
  m.def("run_experiment", [](double g, int n, int M, std::uint64_t seed, int threads) {
    SimConfig cfg;
    cfg.threads = threads;
    cfg.keep_replicas = false;
    SimReport r;
    {
      py::gil_scoped_release release;
      r = run_experiment(g, n, M, seed, cfg);
    }
    py::dict d;
    d["kappa"] = r.kappa;
    d["mean_height"] = r.mean_height;
    d["mean_diam"] = r.mean_diam;
    d["ratio"] = r.ratio;
    d["analytic_ratio"] = r.analytic_ratio;
    d["ks_height"] = r.ks_height;
    d["ks_diam"] = r.ks_diam;
    d["law"] = r.law;
    return d;
  }, py::arg("gamma"), py::arg("n"), py::arg("M"), py::arg("seed"), py::arg("threads") = 0);

  m.def("consistency_suite", [](double g, bool quick) {
    py::list out;
    for (const auto& c : consistency_suite(g, quick)) {
      py::dict d;
      d["name"] = c.name;
      d["value"] = c.value;
      d["reference"] = c.reference;
      d["error"] = c.error;
      d["tol"] = c.tol;
      d["pass"] = c.pass;
      out.append(d);
    }
    return out;
  }, py::arg("gamma"), py::arg("quick") = true);
}
