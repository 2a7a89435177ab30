#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "kvnosc/app.hpp"
#include "kvnosc/ermakov.hpp"
#include "kvnosc/errors.hpp"
#include "kvnosc/freq.hpp"
#include "kvnosc/io.hpp"
#include "kvnosc/koopman_ops.hpp"
#include "kvnosc/oracle.hpp"
#include "kvnosc/propagator.hpp"
#include "kvnosc/scenario.hpp"
#include "kvnosc/verify.hpp"

namespace py = pybind11;
using namespace kvnosc;

namespace {

io::Format parse_format(const std::string& f) {
  if (f == "csv") return io::Format::csv;
  if (f == "json") return io::Format::json;
  throw ConfigError("format must be csv or json, got '" + f + "'");
}

Depth parse_depth(const std::string& d) {
  if (d == "quick") return Depth::quick;
  if (d == "full") return Depth::full;
  throw ConfigError("depth must be quick or full, got '" + d + "'");
}

std::vector<double> column_of(const ErmakovSolution& s, double ErmakovState::*field) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const auto& x : s.samples()) out.push_back(x.*field);
  return out;
}

py::dict run_result(const RunResult& r) {
  py::dict d;
  std::vector<std::string> files;
  for (const auto& f : r.files) files.push_back(f.string());
  d["files"] = files;
  d["max_discrepancy"] = r.max_discrepancy;
  return d;
}

void bind_errors(py::module_& m) {
  // Translators run newest first, so the base goes in before the subclasses.
  const auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base);
  py::register_exception<ExtrapolationError>(m, "ExtrapolationError", base);
  py::register_exception<UnsupportedProfile>(m, "UnsupportedProfile", base);
  py::register_exception<RhoCollapse>(m, "RhoCollapse", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<OutOfRange>(m, "OutOfRange", base);
  py::register_exception<NotAdvection>(m, "NotAdvection", base);
  py::register_exception<DegenerateInvariant>(m, "DegenerateInvariant", base);
}

void bind_profiles(py::module_& m) {
  py::class_<FrequencyProfile>(m, "FrequencyProfile")
      .def_static("hyperbolic", &FrequencyProfile::hyperbolic, py::arg("beta"))
      .def_static("inverse_quadratic", &FrequencyProfile::inverse_quadratic, py::arg("gamma"))
      .def_static("oscillatory", &FrequencyProfile::oscillatory, py::arg("delta"), py::arg("omega"))
      .def_static("constant", &FrequencyProfile::constant, py::arg("k0"))
      .def_static("tabulated", &FrequencyProfile::tabulated, py::arg("knots"))
      .def("k", &FrequencyProfile::k, py::arg("t"))
      .def("analytic_available", &FrequencyProfile::analytic_available)
      .def_property_readonly("kind", [](const FrequencyProfile& p) { return std::string(p.kind()); })
      .def("__repr__", [](const FrequencyProfile& p) { return "<FrequencyProfile " + std::string(p.kind()) + ">"; });

  py::class_<LinearModeSolution>(m, "LinearModeSolution")
      .def_readonly("u", &LinearModeSolution::u)
      .def_readonly("u_dot", &LinearModeSolution::u_dot)
      .def_readonly("omega_u", &LinearModeSolution::omega_u);
  py::class_<AnalyticAuxiliary>(m, "AnalyticAuxiliary")
      .def_readonly("rho", &AnalyticAuxiliary::rho)
      .def_readonly("rho_dot", &AnalyticAuxiliary::rho_dot)
      .def_readonly("omega_rho_raw", &AnalyticAuxiliary::omega_rho_raw);

  m.def("analytic_u", &analytic_u, py::arg("profile"), py::arg("t"));
  m.def("analytic_rho", &analytic_rho, py::arg("profile"), py::arg("t"));
  m.def("omega_rho_from_u", &omega_rho_from_u, py::arg("profile"), py::arg("t0"), py::arg("t"));
}

void bind_ermakov(py::module_& m) {
  py::class_<ErmakovState>(m, "ErmakovState")
      .def_readonly("rho", &ErmakovState::rho)
      .def_readonly("rho_dot", &ErmakovState::rho_dot)
      .def_readonly("omega_rho", &ErmakovState::omega_rho);

  py::class_<InitialData>(m, "InitialData")
      .def(py::init<double, double, double>(), py::arg("rho0") = 1.0, py::arg("rho_dot0") = 0.0,
           py::arg("t_start") = 0.0)
      .def_readwrite("rho0", &InitialData::rho0)
      .def_readwrite("rho_dot0", &InitialData::rho_dot0)
      .def_readwrite("t_start", &InitialData::t_start);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init([](double step, bool adaptive, double abs_tol, double rel_tol) {
             return SolverOptions{step, adaptive, abs_tol, rel_tol};
           }),
           py::arg("step") = 1e-3, py::arg("adaptive") = false, py::arg("abs_tol") = 1e-10,
           py::arg("rel_tol") = 1e-10)
      .def_readwrite("step", &SolverOptions::step)
      .def_readwrite("adaptive", &SolverOptions::adaptive)
      .def_readwrite("abs_tol", &SolverOptions::abs_tol)
      .def_readwrite("rel_tol", &SolverOptions::rel_tol);

  py::class_<ErmakovSolution>(m, "ErmakovSolution")
      .def_property_readonly("profile", &ErmakovSolution::profile)
      .def_property_readonly("t", &ErmakovSolution::grid)
      .def_property_readonly("rho", [](const ErmakovSolution& s) { return column_of(s, &ErmakovState::rho); })
      .def_property_readonly("rho_dot",
                             [](const ErmakovSolution& s) { return column_of(s, &ErmakovState::rho_dot); })
      .def_property_readonly("omega_rho",
                             [](const ErmakovSolution& s) { return column_of(s, &ErmakovState::omega_rho); })
      .def_property_readonly("step", &ErmakovSolution::step)
      .def("sample", &ErmakovSolution::sample, py::arg("t"))
      .def("__len__", &ErmakovSolution::size);

  m.def(
      "solve",
      [](const FrequencyProfile& p, const InitialData& init, double t_end, const SolverOptions& opt) {
        py::gil_scoped_release release;
        return solve(p, init, t_end, opt);
      },
      py::arg("profile"), py::arg("initial") = InitialData{}, py::arg("t_end") = 10.0,
      py::arg("options") = SolverOptions{});

  py::class_<ConvergenceEstimate>(m, "ConvergenceEstimate")
      .def_readonly("order", &ConvergenceEstimate::order)
      .def_readonly("exact_solution", &ConvergenceEstimate::exact_solution)
      .def_readonly("diff_coarse", &ConvergenceEstimate::diff_coarse)
      .def_readonly("diff_fine", &ConvergenceEstimate::diff_fine);
  m.def("convergence_order", &convergence_order, py::arg("profile"), py::arg("initial") = InitialData{},
        py::arg("t_end") = 10.0, py::arg("base_step") = 0.02);
}

void bind_propagator(py::module_& m) {
  py::class_<EtaMap>(m, "EtaMap")
      .def_readonly("eta1", &EtaMap::eta1)
      .def_readonly("eta2", &EtaMap::eta2)
      .def_readonly("eta3", &EtaMap::eta3)
      .def_readonly("eta4", &EtaMap::eta4)
      .def_readonly("t", &EtaMap::t)
      .def("det", &EtaMap::det)
      .def("forward", &EtaMap::forward, py::arg("x"), py::arg("p"))
      .def("pull", &EtaMap::pull, py::arg("x"), py::arg("p"));

  py::class_<GammaCoefficients>(m, "GammaCoefficients")
      .def_readonly("gamma1", &GammaCoefficients::gamma1)
      .def_readonly("gamma2", &GammaCoefficients::gamma2)
      .def_readonly("gamma3", &GammaCoefficients::gamma3)
      .def_readonly("gamma4", &GammaCoefficients::gamma4);

  py::class_<GaussianState>(m, "GaussianState")
      .def(py::init<double, double, double, double>(), py::arg("xc") = 0.0, py::arg("pc") = 0.0,
           py::arg("sigma_x") = 0.5, py::arg("sigma_p") = 0.5)
      .def_readwrite("xc", &GaussianState::xc)
      .def_readwrite("pc", &GaussianState::pc)
      .def_readwrite("sigma_x", &GaussianState::sigma_x)
      .def_readwrite("sigma_p", &GaussianState::sigma_p)
      .def("density", &GaussianState::density, py::arg("x"), py::arg("p"));

  py::class_<CentrePoint>(m, "CentrePoint")
      .def_readonly("t", &CentrePoint::t)
      .def_readonly("x", &CentrePoint::x)
      .def_readonly("p", &CentrePoint::p);

  py::class_<GridWindow>(m, "GridWindow")
      .def(py::init<double, double, double, double>(), py::arg("x_min"), py::arg("x_max"), py::arg("p_min"),
           py::arg("p_max"))
      .def_readwrite("x_min", &GridWindow::x_min)
      .def_readwrite("x_max", &GridWindow::x_max)
      .def_readwrite("p_min", &GridWindow::p_min)
      .def_readwrite("p_max", &GridWindow::p_max);

  py::class_<DensityGrid>(m, "DensityGrid")
      .def_readonly("window", &DensityGrid::window)
      .def_readonly("nx", &DensityGrid::nx)
      .def_readonly("np", &DensityGrid::np)
      .def_readonly("xs", &DensityGrid::xs)
      .def_readonly("ps", &DensityGrid::ps)
      .def_readonly("values", &DensityGrid::values)
      .def("cell_area", &DensityGrid::cell_area)
      .def("mass", &DensityGrid::mass)
      .def("at", &DensityGrid::at, py::arg("ix"), py::arg("ip"));

  m.def("eta_at", &eta_at, py::arg("solution"), py::arg("t"));
  m.def("gamma_at", &gamma_at, py::arg("rho0"), py::arg("rho_dot0"), py::arg("omega_rho"));
  m.def(
      "centre_trajectory",
      [](const ErmakovSolution& s, double xc0, double pc0, const std::vector<double>& times) {
        return centre_trajectory(s, xc0, pc0, times);
      },
      py::arg("solution"), py::arg("xc0"), py::arg("pc0"), py::arg("times"));
  m.def("classical_invariant", &classical_invariant, py::arg("rho"), py::arg("rho_dot"), py::arg("x"),
        py::arg("p"));
  m.def(
      "assemble_full_propagator",
      [](const ErmakovSolution& s, double t) {
        const PointMap pm = assemble_full_propagator(s, t);
        return py::make_tuple(py::make_tuple(pm.matrix.a, pm.matrix.b, pm.matrix.c, pm.matrix.d), pm.amplitude);
      },
      py::arg("solution"), py::arg("t"), "Returns ((a, b, c, d), amplitude) with the matrix row major.");
  m.def("default_window", &default_window, py::arg("state0"), py::arg("map"), py::arg("widths") = 6.0);
  m.def("resolving_grid_size", &resolving_grid_size, py::arg("state0"), py::arg("map"), py::arg("widths") = 6.0);
  m.def("evaluate_grid", &evaluate_grid, py::arg("state0"), py::arg("map"), py::arg("window"), py::arg("n") = 256,
        py::call_guard<py::gil_scoped_release>());
}

void bind_koopman(py::module_& m) {
  m.def(
      "alpha_from_rho", [](double rho, double rho_dot) { return alpha_from_rho(rho, rho_dot).alpha; },
      py::arg("rho"), py::arg("rho_dot"));
  m.def(
      "invariance_residual",
      [](const FrequencyProfile& p, const ErmakovSolution& s, double t, int degree) {
        return invariance_residual(p, s, t, degree);
      },
      py::arg("profile"), py::arg("solution"), py::arg("t"), py::arg("test_degree") = 4);
  m.def("verify_disentangling", &verify_disentangling, py::arg("theta"));
}

void bind_oracle(py::module_& m) {
  auto o = m.def_submodule("oracle", "Characteristics of the Liouville equation, integrated directly");
  py::class_<oracle::Trajectory>(o, "Trajectory")
      .def_readonly("times", &oracle::Trajectory::times)
      .def_readonly("states", &oracle::Trajectory::states);
  py::class_<oracle::Moments>(o, "Moments")
      .def_readonly("t", &oracle::Moments::t)
      .def_readonly("mean_x", &oracle::Moments::mean_x)
      .def_readonly("mean_p", &oracle::Moments::mean_p)
      .def_readonly("var_x", &oracle::Moments::var_x)
      .def_readonly("var_p", &oracle::Moments::var_p);
  o.def("integrate_characteristics", &oracle::integrate_characteristics, py::arg("profile"), py::arg("x0"),
        py::arg("p0"), py::arg("t_end"), py::arg("step"), py::arg("t_start") = 0.0,
        py::call_guard<py::gil_scoped_release>());
  o.def("ensemble_moments", &oracle::ensemble_moments, py::arg("profile"), py::arg("state0"),
        py::arg("n_samples"), py::arg("t_end"), py::arg("step"), py::arg("seed"), py::arg("stride") = 100,
        py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());
  o.def("invariant_along", &oracle::invariant_along, py::arg("solution"), py::arg("trajectory"));
}

void bind_scenario(py::module_& m) {
  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("preset", &Scenario::preset)
      .def_readwrite("kind", &Scenario::kind)
      .def_readwrite("beta", &Scenario::beta)
      .def_readwrite("beta_sweep", &Scenario::beta_sweep)
      .def_readwrite("gamma", &Scenario::gamma)
      .def_readwrite("delta", &Scenario::delta)
      .def_readwrite("omega", &Scenario::omega)
      .def_readwrite("k0", &Scenario::k0)
      .def_readwrite("knots", &Scenario::knots)
      .def_readwrite("rho0", &Scenario::rho0)
      .def_readwrite("rho_dot0", &Scenario::rho_dot0)
      .def_readwrite("analytic_initial_data", &Scenario::analytic_initial_data)
      .def_readwrite("xc", &Scenario::xc)
      .def_readwrite("pc", &Scenario::pc)
      .def_readwrite("sigma_x", &Scenario::sigma_x)
      .def_readwrite("sigma_p", &Scenario::sigma_p)
      .def_readwrite("t_end", &Scenario::t_end)
      .def_readwrite("step", &Scenario::step)
      .def_readwrite("adaptive", &Scenario::adaptive)
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("output_every", &Scenario::output_every)
      .def_readwrite("grid_n", &Scenario::grid_n)
      .def_readwrite("grid_widths", &Scenario::grid_widths)
      .def_readwrite("snapshots", &Scenario::snapshots)
      .def_readwrite("n_samples", &Scenario::n_samples)
      .def("profile", &Scenario::profile)
      .def("initial_data", &Scenario::initial_data)
      .def("solver_options", &Scenario::solver_options)
      .def("initial_state", &Scenario::initial_state)
      .def("snapshot_times", &Scenario::snapshot_times)
      .def("canonical", &Scenario::canonical)
      .def("hash", &Scenario::hash)
      .def("expand", &Scenario::expand)
      .def("validate", &Scenario::validate)
      .def(
          "set", [](Scenario& s, const std::string& key, const std::string& value) { apply_setting(s, key, value); },
          py::arg("key"), py::arg("value"));

  m.def("preset", [](const std::string& name) { return preset(name); }, py::arg("name"));
  m.def("preset_names", &preset_names);
  m.def(
      "parse_scenario",
      [](const std::string& text, const Scenario& base) {
        std::istringstream in(text);
        return parse_scenario(in, base);
      },
      py::arg("text"), py::arg("base") = Scenario{});
  m.def("load_scenario_file", &load_scenario_file, py::arg("path"), py::arg("base") = Scenario{});
}

void bind_runs(py::module_& m) {
  auto runner = [](RunResult (*fn)(const Scenario&, const OutputOptions&)) {
    return [fn](const Scenario& s, const std::filesystem::path& out, const std::string& format) {
      RunResult r;
      {
        py::gil_scoped_release release;
        r = fn(s, {out, parse_format(format)});
      }
      return run_result(r);
    };
  };
  m.def("run_solve_ermakov", runner(&run_solve_ermakov), py::arg("scenario"), py::arg("out"),
        py::arg("format") = "csv");
  m.def("run_trajectory", runner(&run_trajectory), py::arg("scenario"), py::arg("out"), py::arg("format") = "csv");
  m.def("run_evolve", runner(&run_evolve), py::arg("scenario"), py::arg("out"), py::arg("format") = "csv");

  py::class_<Check>(m, "Check")
      .def_readonly("name", &Check::name)
      .def_readonly("parameter", &Check::parameter)
      .def_readonly("residual", &Check::residual)
      .def_readonly("tolerance", &Check::tolerance)
      .def_readonly("expected_fail", &Check::expected_fail)
      .def("passed", &Check::passed);
  py::class_<Report>(m, "Report")
      .def_readonly("checks", &Report::checks)
      .def_readonly("wall_seconds", &Report::wall_seconds)
      .def("all_passed", &Report::all_passed)
      .def("to_text", &Report::to_text)
      .def("to_json", &Report::to_json);
  m.def(
      "run_verification",
      [](const std::string& depth) {
        const Depth d = parse_depth(depth);
        py::gil_scoped_release release;
        return run_verification(d);
      },
      py::arg("depth") = "quick");
  m.def("compare_centre_files", &compare_centre_files, py::arg("dir"));

  m.def(
      "read_csv",
      [](const std::filesystem::path& path) {
        const io::Table t = io::read_csv(path);
        py::dict d;
        d["scenario_hash"] = t.scenario_hash;
        d["columns"] = t.columns;
        d["rows"] = t.rows;
        return d;
      },
      py::arg("path"));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Koopman-von Neumann oscillator core";
  bind_errors(m);
  bind_profiles(m);
  bind_ermakov(m);
  bind_propagator(m);
  bind_koopman(m);
  bind_oracle(m);
  bind_scenario(m);
  bind_runs(m);
}
