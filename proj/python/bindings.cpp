#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "pxsys/cli_io.hpp"
#include "pxsys/function_space.hpp"
#include "pxsys/moser.hpp"

namespace py = pybind11;
using namespace pxsys;

namespace {

GridPtr grid_for(int dimension, int resolution, double lo, double hi) {
  std::vector<Interval> ext(dimension, Interval{lo, hi});
  std::vector<int> res(dimension, resolution);
  return build_grid(ext, res);
}

py::dict single_solve(const ExponentDescriptor& p, double source, int resolution, int dimension) {
  const GridPtr grid = grid_for(dimension, resolution, 0.0, 1.0);
  const auto res = solve_dirichlet(DirichletProblem::constant_source(ExponentField(grid, p), source), SolverConfig{});
  std::vector<double> x1, x2;
  for (std::size_t n = 0; n < grid->node_count(); ++n) {
    const auto x = grid->node_coords(n);
    x1.push_back(x[0]);
    x2.push_back(x[1]);
  }
  py::dict d;
  d["x1"] = x1;
  d["x2"] = x2;
  d["u"] = res.u.values;
  d["converged"] = res.report.converged;
  d["residual"] = res.report.residual;
  d["iterations"] = res.report.iterations;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Solver and verification harness for singular p(x)-Laplacian systems";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<HypothesisError>(m, "HypothesisError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  py::class_<ConstantExponent>(m, "ConstantExponent")
      .def(py::init([](double v) { return ConstantExponent{v}; }), py::arg("value"))
      .def_readwrite("value", &ConstantExponent::value);
  py::class_<AffineExponent>(m, "AffineExponent")
      .def(py::init([](double a, double b1, double b2) { return AffineExponent{a, b1, b2}; }), py::arg("a"),
           py::arg("b1"), py::arg("b2"));
  py::class_<SinusoidalExponent>(m, "SinusoidalExponent")
      .def(py::init([](double a, double b, double c, double e) { return SinusoidalExponent{a, b, c, e}; }),
           py::arg("a"), py::arg("b"), py::arg("c"), py::arg("e"));
  m.def("describe", &describe, py::arg("descriptor"));
  m.def("evaluate_exponent", py::overload_cast<const ExponentDescriptor&, const std::array<double, 2>&>(&evaluate),
        py::arg("descriptor"), py::arg("x"));

  m.def("format_config", [](const std::string& text) { return format_config(parse_config(text)); },
        py::arg("text"), "Resolved configuration, defaults included");

  m.def(
      "run",
      [](const std::string& text, const std::filesystem::path& out_dir, std::optional<std::string> mode,
         std::optional<int> resolution) {
        RunConfig cfg = parse_config(text);
        if (mode) {
          cfg.mode = *mode;
          if (cfg.mode == "competitive") cfg.structure = "competitive";
        }
        if (resolution) apply_resolution_override(cfg, *resolution);
        RunOutcome out;
        {
          py::gil_scoped_release release;
          out = run(cfg, out_dir);
        }
        py::dict d;
        d["exit_code"] = out.exit_code;
        d["message"] = out.message;
        d["report_json"] = out.report_json;
        d["written"] = out.written;
        return d;
      },
      py::arg("config_text"), py::arg("out_dir"), py::arg("mode") = py::none(), py::arg("resolution") = py::none(),
      "Runs a configuration and writes its artifacts into out_dir");

  m.def("solve_single", &single_solve, py::arg("p"), py::arg("source") = 1.0, py::arg("resolution") = 33,
        py::arg("dimension") = 2, "Dirichlet problem with a constant source on the unit square or interval");

  m.def(
      "luxemburg_norm",
      [](const std::vector<double>& values, const ExponentDescriptor& p, int resolution, int dimension) {
        const GridPtr grid = grid_for(dimension, resolution, 0.0, 1.0);
        if (values.size() != grid->node_count()) throw ConfigError("values size does not match the grid");
        return luxemburg_norm(GridFunction(grid, values, false), ExponentField(grid, p));
      },
      py::arg("values"), py::arg("p"), py::arg("resolution"), py::arg("dimension") = 2);

  m.def("sobolev_conjugate", py::overload_cast<double, int>(&sobolev_conjugate), py::arg("s"), py::arg("N"));
  m.def(
      "series_limit",
      [](double p_minus, int N, int terms) {
        const auto r = series_limit(p_minus, N, terms);
        return py::make_tuple(r.limit, r.partial_sums);
      },
      py::arg("p_minus"), py::arg("N"), py::arg("terms") = 40);

  m.attr("EXIT_OK") = static_cast<int>(kExitOk);
  m.attr("EXIT_CONFIG") = static_cast<int>(kExitConfig);
  m.attr("EXIT_VERIFICATION") = static_cast<int>(kExitVerification);
  m.attr("EXIT_NONCONVERGENCE") = static_cast<int>(kExitNonConvergence);
  m.attr("EXIT_HYPOTHESIS") = static_cast<int>(kExitHypothesis);
}
