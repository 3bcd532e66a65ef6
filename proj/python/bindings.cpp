#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "extdesign/criteria.hpp"
#include "extdesign/curvature.hpp"
#include "extdesign/cutting_plane.hpp"
#include "extdesign/io.hpp"

namespace py = pybind11;
using namespace extdesign;

namespace {

struct Problem {
  CriterionSpec spec;
  ParameterDomain domain;
  SearchOptions search;
};

Problem make_problem(const RegressionModel& model, const std::string& criterion,
                     const std::optional<Vector>& theta0, const Vector& lower, const Vector& upper,
                     double k, bool worst_case, const std::optional<Vector>& c,
                     const std::optional<std::string>& functional, int grid_n, std::uint64_t seed) {
  CriterionSpec spec;
  spec.kind = parse_criterion_kind(criterion);
  spec.theta0 = theta0;
  spec.K = k;
  spec.worst_case = worst_case;
  if (functional) spec.functional = pk1_functional(*functional);
  if (c) spec.functional = linear_functional(*c);
  spec.validate(model.num_params());
  SearchOptions search;
  search.grid.n_points = grid_n;
  search.grid.seed = seed;
  return {spec, ParameterDomain(Box(lower, upper)), search};
}

py::dict probe_dict(const Probe& p) {
  py::dict d;
  d["theta"] = p.theta;
  d["theta0"] = p.theta0;
  if (p.direction) d["direction"] = *p.direction;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Extended optimality criteria for nonlinear regression designs.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<CriterionError>(m, "CriterionError", PyExc_ValueError);
  py::register_exception<DesignError>(m, "DesignError", PyExc_ValueError);
  py::register_exception<RegistryError>(m, "RegistryError", PyExc_KeyError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);

  py::class_<RegressionModel>(m, "Model")
      .def_property_readonly("name", &RegressionModel::name)
      .def_property_readonly("num_params", &RegressionModel::num_params)
      .def_property_readonly("design_dim", &RegressionModel::design_dim)
      .def("response", &RegressionModel::response, py::arg("x"), py::arg("theta"))
      .def("jacobian", &RegressionModel::jacobian, py::arg("x"), py::arg("theta"))
      .def("hessian", &RegressionModel::hessian, py::arg("x"), py::arg("theta"))
      .def("__repr__", [](const RegressionModel& mdl) { return "<Model " + mdl.name() + ">"; });

  m.def(
      "builtin_model",
      [](const std::string& name, double radius) {
        ModelOptions o;
        o.radius = radius;
        return builtin_model(name, o);
      },
      py::arg("name"), py::arg("radius") = 1.0, "circle, bilinear2d or pk1");

  py::class_<DesignMeasure>(m, "Design")
      .def(py::init([](const std::vector<DesignPoint>& support, const Vector& weights, bool renormalize) {
             ValidateOptions o;
             o.renormalize = renormalize;
             return validate_design(support, weights, o);
           }),
           py::arg("support"), py::arg("weights"), py::arg("renormalize") = false)
      .def_property_readonly("support", &DesignMeasure::support)
      .def_property_readonly("weights", &DesignMeasure::weights)
      .def("__len__", &DesignMeasure::size)
      .def("__repr__", [](const DesignMeasure& xi) { return io::format_design(xi); });

  m.def(
      "evaluate",
      [](const std::string& criterion, const RegressionModel& model, const DesignMeasure& xi,
         const Vector& lower, const Vector& upper, const std::optional<Vector>& theta0,
         const DesignSpace& xspace, double k, bool worst_case, const std::optional<Vector>& c,
         const std::optional<std::string>& functional, int grid_n, std::uint64_t seed) {
        const Problem pr = make_problem(model, criterion, theta0, lower, upper, k, worst_case, c,
                                        functional, grid_n, seed);
        const CriterionValue v = evaluate_phi(pr.spec, model, xi, pr.domain, pr.search, xspace);
        py::dict d;
        d["value"] = v.value;
        d["argmin"] = probe_dict(v.argmin);
        if (v.argmin_x) d["argmin_x"] = *v.argmin_x;
        return d;
      },
      py::arg("criterion"), py::arg("model"), py::arg("design"), py::arg("lower"), py::arg("upper"),
      py::arg("theta0") = py::none(), py::arg("xspace") = DesignSpace{}, py::arg("k") = 0.0,
      py::arg("worst_case") = false, py::arg("c") = py::none(), py::arg("functional") = py::none(),
      py::arg("grid_n") = 10000, py::arg("seed") = 20131001,
      "phi of a design over the box [lower, upper].");

  m.def(
      "optimize",
      [](const std::string& criterion, const RegressionModel& model, const DesignSpace& xspace,
         const Vector& lower, const Vector& upper, const std::optional<Vector>& theta0, double k,
         bool worst_case, const std::optional<Vector>& c, const std::optional<std::string>& functional,
         int grid_n, std::uint64_t seed, double eps, int max_iter, bool refine) {
        const Problem pr = make_problem(model, criterion, theta0, lower, upper, k, worst_case, c,
                                        functional, grid_n, seed);
        OptimizeOptions o;
        o.search = pr.search;
        o.eps = eps;
        o.max_iter = max_iter;
        const OptimizationReport rep = refine ? optimize_refined(pr.spec, model, xspace, pr.domain, o)
                                              : optimize(pr.spec, model, xspace, pr.domain, o);
        py::dict d;
        d["design"] = rep.design;
        d["value"] = rep.value;
        d["upper_bound"] = rep.upper_bound;
        d["converged"] = rep.converged;
        d["iterations"] = rep.iterations;
        if (rep.certificate) d["certificate"] = rep.certificate->value;
        return d;
      },
      py::arg("criterion"), py::arg("model"), py::arg("xspace"), py::arg("lower"), py::arg("upper"),
      py::arg("theta0") = py::none(), py::arg("k") = 0.0, py::arg("worst_case") = false,
      py::arg("c") = py::none(), py::arg("functional") = py::none(), py::arg("grid_n") = 10000,
      py::arg("seed") = 20131001, py::arg("eps") = 1e-10, py::arg("max_iter") = 500,
      py::arg("refine") = false, "Cutting-plane optimal design on a finite design space.");

  m.def(
      "classical",
      [](const std::string& criterion, const RegressionModel& model, const DesignMeasure& xi,
         const Vector& theta0, const std::optional<Vector>& c, const DesignSpace& xspace) {
        const CriterionKind kind = parse_criterion_kind(criterion);
        std::optional<ScalarFunctional> g;
        if (c) g = linear_functional(*c);
        return classical_value(kind, model, xi, theta0, g ? &*g : nullptr, xspace);
      },
      py::arg("criterion"), py::arg("model"), py::arg("design"), py::arg("theta0"),
      py::arg("c") = py::none(), py::arg("xspace") = DesignSpace{});

  m.def(
      "curvature",
      [](const RegressionModel& model, const DesignMeasure& xi, const Vector& theta, int starts) {
        CurvatureOptions o;
        o.starts = starts;
        const CurvatureReport r = curvature_measures(model, xi, theta, o);
        py::dict d;
        d["C_par"] = r.C_par;
        d["C_int"] = r.C_int;
        d["C_tot"] = r.C_tot;
        d["singular"] = r.singular;
        return d;
      },
      py::arg("model"), py::arg("design"), py::arg("theta"), py::arg("starts") = 200);

  m.def(
      "solve_maximin",
      [](const Matrix& h) {
        const MaximinSolution s = solve_maximin(MaximinLP{h, {}});
        if (s.status != LpStatus::Optimal) throw NumericError(std::string("LP: ") + to_string(s.status));
        return py::make_tuple(s.w, s.t, s.mu);
      },
      py::arg("h"), "max over w in the simplex of min_j (h^T w)_j; returns (w, t, mu).");

  m.def("parse_range", &io::parse_range, py::arg("spec"));
}
