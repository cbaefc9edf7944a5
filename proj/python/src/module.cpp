#include <sstream>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "twogrid/config.hpp"
#include "twogrid/experiment.hpp"
#include "twogrid/manifold.hpp"
#include "twogrid/optimizer.hpp"
#include "twogrid/tomography.hpp"
#include "twogrid/transfer.hpp"

namespace py = pybind11;
using namespace twogrid;

namespace {

GridShape shape_of(const std::pair<Eigen::Index, Eigen::Index>& s) { return {s.first, s.second}; }

py::dict trace_dict(const std::vector<IterateRecord>& trace) {
  std::vector<int> iter;
  std::vector<std::string> level;
  std::vector<double> f, gnorm, seconds;
  std::vector<long> evals;
  for (const auto& r : trace) {
    iter.push_back(r.iter);
    level.emplace_back(to_string(r.level));
    f.push_back(r.f);
    gnorm.push_back(r.gnorm);
    evals.push_back(r.fine_grad_evals);
    seconds.push_back(r.seconds);
  }
  py::dict d;
  d["iter"] = iter;
  d["level"] = level;
  d["f"] = f;
  d["gnorm"] = gnorm;
  d["fine_grad_evals"] = evals;
  d["seconds"] = seconds;
  return d;
}

// Solver settings from "section.key" style keyword arguments, e.g.
// solve(pb, "two_level_rg", **{"solver.max_iter": 10}).
SolverConfig solver_config(const std::string& mode, const py::kwargs& settings) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  for (const auto& [key, value] : settings) {
    apply_setting(cfg, py::str(key), py::str(value));
  }
  cfg.solver.mode = parse_mode(mode);
  cfg.solver.validate();
  return cfg.solver;
}

}  // namespace

PYBIND11_MODULE(_twogrid, m) {
  m.doc() = "Two-level Riemannian optimization on the box with tomography benchmarks.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.attr("EPS_CLIP") = kEpsClip;

  // Manifold operations on plain arrays; inputs are clipped into the box.
  m.def("exp_map", [](const Vector& y, const Vector& v) { return exp_map(BoxPoint(y), v).values(); }, py::arg("y"),
        py::arg("v"));
  m.def("exp_inv", [](const Vector& y, const Vector& y2) { return exp_inv(BoxPoint(y), BoxPoint(y2)); },
        py::arg("y"), py::arg("y2"));
  m.def("inner", [](const Vector& y, const Vector& v, const Vector& w) { return inner(BoxPoint(y), v, w); },
        py::arg("y"), py::arg("v"), py::arg("w"));
  m.def("riem_grad", [](const Vector& y, const Vector& g) { return riem_grad(BoxPoint(y), g); }, py::arg("y"),
        py::arg("grad"));
  m.def("dexp", [](const Vector& y, const Vector& u, const Vector& v) { return dexp(BoxPoint(y), u, v); },
        py::arg("y"), py::arg("u"), py::arg("v"));

  // Grid transfers; `shape` is the fine (rows, cols).
  m.def("prolong", [](std::pair<Eigen::Index, Eigen::Index> shape, const Vector& x) {
    return prolong(GridHierarchy(shape_of(shape)), BoxPoint(x)).values();
  }, py::arg("shape"), py::arg("x"));
  m.def("restrict", [](std::pair<Eigen::Index, Eigen::Index> shape, const Vector& y) {
    return restrict_point(GridHierarchy(shape_of(shape)), BoxPoint(y)).values();
  }, py::arg("shape"), py::arg("y"));
  m.def("dprolong", [](std::pair<Eigen::Index, Eigen::Index> shape, const Vector& x, const Vector& u) {
    return dprolong(GridHierarchy(shape_of(shape)), BoxPoint(x), u);
  }, py::arg("shape"), py::arg("x"), py::arg("u"));
  m.def("restrict_tangent", [](std::pair<Eigen::Index, Eigen::Index> shape, const Vector& y, const Vector& v) {
    return restrict_tangent(GridHierarchy(shape_of(shape)), BoxPoint(y), v);
  }, py::arg("shape"), py::arg("y"), py::arg("v"));

  m.def("phantom_names", &phantom_names);
  m.def("phantom", [](const std::string& name, Eigen::Index size, std::uint64_t seed) {
    const Phantom ph = make_phantom(parse_phantom(name), size, seed);
    return Eigen::MatrixXd(Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        ph.image.data(), ph.shape.rows, ph.shape.cols));
  }, py::arg("name"), py::arg("size"), py::arg("seed") = 7, "Phantom image as a (size, size) array.");

  py::class_<Problem>(m, "Problem")
      .def_property_readonly("shape", [](const Problem& p) { return std::make_pair(p.shape().rows, p.shape().cols); })
      .def_property_readonly("num_pixels", &Problem::num_pixels)
      .def_property_readonly("num_rays", &Problem::num_rays)
      .def_property_readonly("lam", &Problem::lambda)
      .def_property_readonly("rho", &Problem::rho)
      .def_property_readonly("b", &Problem::b)
      .def("objective", [](const Problem& p, const Vector& y) {
        const ObjectiveEval e = objective(p, BoxPoint(y));
        return py::make_tuple(e.value, e.eucl_grad);
      }, py::arg("y"), "(value, Euclidean gradient) at y.")
      .def("__repr__", [](const Problem& p) {
        std::ostringstream s;
        s << "<Problem " << p.shape().rows << "x" << p.shape().cols << ", " << p.num_rays() << " rays>";
        return s.str();
      });

  m.def("tomography_problem", [](const std::string& phantom, int grid, double undersampling, double lam, double rho,
                                 std::uint64_t seed) {
    const Phantom ph = make_phantom(parse_phantom(phantom), grid, seed);
    return synthesize(ph, undersampling, lam, rho);
  }, py::arg("phantom"), py::arg("grid") = 64, py::arg("undersampling") = 0.02, py::arg("lam") = 0.5,
        py::arg("rho") = 0.5, py::arg("seed") = 7);

  m.def("solve", [](const Problem& pb, const std::string& mode, const py::kwargs& settings) {
    const SolverConfig cfg = solver_config(mode, settings);
    RunResult r;
    {
      py::gil_scoped_release release;
      r = solve(pb, cfg);
    }
    py::dict out;
    out["trace"] = trace_dict(r.trace);
    out["solution"] = Vector(r.solution.values());
    out["status"] = std::string(to_string(r.status));
    out["coarse_attempts"] = r.coarse_attempts;
    out["coarse_accepted"] = r.coarse_accepted;
    return out;
  }, py::arg("problem"), py::arg("mode") = "two_level_rg",
        "Run one solver. Extra keyword arguments are config settings such as solver.max_iter=10.");

  m.def("default_config", []() { return dump_config(ExperimentConfig::defaults()); });
  m.def("run_experiment", [](const std::string& config_path, const std::vector<std::string>& overrides) {
    const ExperimentConfig cfg = load_config(config_path, overrides);
    std::vector<CellSummary> cells;
    {
      py::gil_scoped_release release;
      cells = run_experiment(cfg);
    }
    py::list out;
    for (const auto& c : cells) {
      py::dict d;
      d["phantom"] = c.phantom;
      d["mode"] = std::string(to_string(c.mode));
      d["status"] = std::string(to_string(c.status));
      d["final_f"] = c.final_f;
      d["fine_grad_evals"] = c.fine_grad_evals;
      d["trace_file"] = c.trace_file;
      out.append(d);
    }
    return out;
  }, py::arg("config_path"), py::arg("overrides") = std::vector<std::string>{});

  m.def("compare", [](const std::vector<std::string>& paths) {
    std::vector<Trace> traces;
    for (const auto& p : paths) traces.push_back(read_trace_file(p));
    std::ostringstream out;
    write_compare_table(out, compare_traces(traces, paths));
    return out.str();
  }, py::arg("trace_paths"), "Threshold table (CSV text) for traces of one problem.");
}
