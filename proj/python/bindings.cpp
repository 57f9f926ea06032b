#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spdemove/cli.hpp"
#include "spdemove/errors.hpp"
#include "spdemove/experiments.hpp"
#include "spdemove/inference.hpp"
#include "spdemove/io.hpp"
#include "spdemove/simulator.hpp"
#include "spdemove/spectral_basis.hpp"

namespace py = pybind11;
using namespace spdemove;

namespace {

std::vector<ModePath> ensemble_paths(const ModeEnsemble& e) { return e.paths; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral-Galerkin SPDE simulator and drift-parameter MLE";

  auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<PathOverflowError>(m, "PathOverflowError", numerical.ptr());
  py::register_exception<SingularityError>(m, "SingularityError", numerical.ptr());
  py::register_exception<DegenerateDataError>(m, "DegenerateDataError", numerical.ptr());
  py::register_exception<ReplicationError>(m, "ReplicationError", numerical.ptr());
  (void)validation;

  // spectral basis
  py::class_<Mode>(m, "Mode")
      .def_readonly("index", &Mode::index)
      .def_readonly("multi_index", &Mode::multi_index)
      .def_readonly("lambda_", &Mode::lambda);

  py::class_<SpectralBasis>(m, "SpectralBasis")
      .def_property_readonly("dimension", &SpectralBasis::dimension)
      .def_property_readonly("size", &SpectralBasis::size)
      .def_property_readonly("modes", &SpectralBasis::modes)
      .def("lambdas", &SpectralBasis::lambdas)
      .def("__len__", &SpectralBasis::size);

  m.def("build_basis", &build_basis, py::arg("dimension"), py::arg("n_modes"));
  m.def(
      "eigenfunction_value",
      [](const SpectralBasis& b, std::size_t k, std::vector<double> xi) {
        return eigenfunction_value(b, k, xi);
      },
      py::arg("basis"), py::arg("mode_index"), py::arg("xi"));
  m.def("eigenfunction_value",
        py::overload_cast<const SpectralBasis&, std::size_t, double>(&eigenfunction_value),
        py::arg("basis"), py::arg("mode_index"), py::arg("xi"));
  m.def("weyl_ratio", &weyl_ratio);
  m.def("weyl_constant", &weyl_constant);

  py::class_<KernelCoefficients>(m, "KernelCoefficients")
      .def_readonly("advection", &KernelCoefficients::advection)
      .def_readonly("diffusion_variance", &KernelCoefficients::diffusion_variance)
      .def_readonly("pde_diffusion", &KernelCoefficients::pde_diffusion);
  m.def("kernel_to_coefficients", &kernel_to_coefficients, py::arg("mu"), py::arg("sigma_sq"),
        py::arg("tau"));

  // model and simulator
  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double theta, double beta, double sigma, double gamma) {
             ModelParams p{theta, beta, sigma, gamma};
             p.validate();
             return p;
           }),
           py::arg("theta"), py::arg("beta"), py::arg("sigma"), py::arg("gamma") = 0.0)
      .def_readwrite("theta", &ModelParams::theta)
      .def_readwrite("beta", &ModelParams::beta)
      .def_readwrite("sigma", &ModelParams::sigma)
      .def_readwrite("gamma", &ModelParams::gamma);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<double, double>(), py::arg("t_final"), py::arg("dt"))
      .def_property_readonly("t_final", &TimeGrid::t_final)
      .def_property_readonly("dt", &TimeGrid::dt)
      .def_property_readonly("n_steps", &TimeGrid::n_steps);

  py::enum_<Scheme>(m, "Scheme").value("exact", Scheme::exact).value("euler", Scheme::euler);

  py::class_<ModePath>(m, "ModePath")
      .def_readonly("mode_index", &ModePath::mode_index)
      .def_readonly("lambda_", &ModePath::lambda)
      .def_readonly("values", &ModePath::values);

  py::class_<ModeEnsemble>(m, "ModeEnsemble")
      .def_readonly("basis", &ModeEnsemble::basis)
      .def_readonly("params", &ModeEnsemble::params)
      .def_readonly("grid", &ModeEnsemble::grid)
      .def_readonly("seed", &ModeEnsemble::seed)
      .def_property_readonly("paths", &ensemble_paths);

  m.def("drift_coefficient", &drift_coefficient, py::arg("lambda_"), py::arg("params"));
  m.def("noise_coefficient", &noise_coefficient, py::arg("lambda_"), py::arg("params"));
  m.def("mean_at", &mean_at, py::arg("u0"), py::arg("lambda_"), py::arg("params"), py::arg("t"));
  m.def("second_moment_at", &second_moment_at, py::arg("u0"), py::arg("lambda_"),
        py::arg("params"), py::arg("t"));
  m.def(
      "simulate_ensemble",
      [](const SpectralBasis& basis, const ModelParams& params, std::vector<double> ic,
         const TimeGrid& grid, std::uint64_t seed, Scheme scheme, std::uint64_t replication,
         double overflow_threshold) {
        return simulate_ensemble(basis, params, ic, grid, seed, scheme,
                                 {replication, overflow_threshold});
      },
      py::arg("basis"), py::arg("params"), py::arg("initial_coefficients"), py::arg("grid"),
      py::arg("seed"), py::arg("scheme") = Scheme::exact, py::arg("replication") = 0,
      py::arg("overflow_threshold") = kDefaultOverflowThreshold);
  m.def(
      "dirac_initial_coefficients",
      [](const SpectralBasis& b, double xi0) { return dirac_initial_coefficients(b, xi0); },
      py::arg("basis"), py::arg("xi0"));
  m.def(
      "evaluate_field",
      [](const ModeEnsemble& e, std::size_t t_index, double xi) {
        return evaluate_field(e, t_index, xi);
      },
      py::arg("ensemble"), py::arg("t_index"), py::arg("xi"));
  m.def(
      "trajectory_at", [](const ModeEnsemble& e, double xi) { return trajectory_at(e, xi); },
      py::arg("ensemble"), py::arg("xi"));
  m.def("parseval_norm", &parseval_norm, py::arg("ensemble"), py::arg("t_index"));

  // inference
  m.def("ito_sum", [](std::vector<double> v) { return ito_sum(v); });
  m.def("energy_quadrature", [](std::vector<double> v, double dt) {
    return energy_quadrature(v, dt);
  });

  py::class_<SufficientStats>(m, "SufficientStats")
      .def(py::init([](double i1, double i2, double i3, double i4, double i5, double gamma,
                       double sigma) {
             SufficientStats s;
             s.i1 = i1;
             s.i2 = i2;
             s.i3 = i3;
             s.i4 = i4;
             s.i5 = i5;
             s.gamma = gamma;
             s.sigma = sigma;
             return s;
           }),
           py::arg("i1"), py::arg("i2"), py::arg("i3"), py::arg("i4"), py::arg("i5"),
           py::arg("gamma") = 0.0, py::arg("sigma") = 1.0)
      .def_readonly("i1", &SufficientStats::i1)
      .def_readonly("i2", &SufficientStats::i2)
      .def_readonly("i3", &SufficientStats::i3)
      .def_readonly("i4", &SufficientStats::i4)
      .def_readonly("i5", &SufficientStats::i5)
      .def_readonly("per_mode_energy", &SufficientStats::per_mode_energy);

  py::class_<EstimateResult>(m, "EstimateResult")
      .def_readonly("theta_hat", &EstimateResult::theta_hat)
      .def_readonly("beta_hat", &EstimateResult::beta_hat)
      .def_readonly("j1", &EstimateResult::j1)
      .def_readonly("j2", &EstimateResult::j2)
      .def_readonly("det_factor", &EstimateResult::det_factor)
      .def_readonly("r1", &EstimateResult::r1)
      .def_readonly("r2", &EstimateResult::r2)
      .def_readonly("fisher_theta", &EstimateResult::fisher_theta)
      .def("to_dict", [](const EstimateResult& r) {
        py::dict d;
        const auto js = io::to_json(r);
        for (auto it = js.begin(); it != js.end(); ++it) d[py::str(it.key())] = it->get<double>();
        return d;
      });

  m.def("sufficient_statistics",
        py::overload_cast<const ModeEnsemble&>(&sufficient_statistics), py::arg("ensemble"));
  m.def("estimate", &estimate, py::arg("stats"), py::arg("eps") = kDefaultSingularityEps);
  m.def(
      "normal_equation_residuals",
      [](const SufficientStats& s, const EstimateResult& r) {
        const auto res = normal_equation_residuals(s, r);
        return py::make_tuple(res.r1, res.r2);
      },
      py::arg("stats"), py::arg("result"));
  m.def(
      "proof_diagnostics",
      [](const SufficientStats& s) {
        const auto d = proof_diagnostics(s);
        return py::make_tuple(d.j1, d.j2, d.det_factor);
      },
      py::arg("stats"));
  m.def("expected_mode_energy", &expected_mode_energy, py::arg("lambda_"), py::arg("params0"),
        py::arg("t_final"));
  m.def(
      "fisher_information_theta",
      [](const SpectralBasis& b, const ModelParams& p, double t) {
        const auto fi = fisher_information_theta(b, p, t);
        return py::make_tuple(fi.exact, fi.asymptotic);
      },
      py::arg("basis"), py::arg("params0"), py::arg("t_final"));

  // experiments
  py::class_<StudyConfig>(m, "StudyConfig")
      .def(py::init<>())
      .def_readwrite("params0", &StudyConfig::params0)
      .def_readwrite("dimension", &StudyConfig::dimension)
      .def_readwrite("n_modes", &StudyConfig::n_modes)
      .def_readwrite("t_final", &StudyConfig::t_final)
      .def_readwrite("dt", &StudyConfig::dt)
      .def_readwrite("reps", &StudyConfig::reps)
      .def_readwrite("seed", &StudyConfig::seed)
      .def_readwrite("scheme", &StudyConfig::scheme)
      .def_readwrite("workers", &StudyConfig::workers)
      .def_readwrite("overflow_threshold", &StudyConfig::overflow_threshold)
      .def_readwrite("singularity_eps", &StudyConfig::singularity_eps)
      .def_readwrite("xi0", &StudyConfig::xi0);

  py::class_<ParameterSummary>(m, "ParameterSummary")
      .def_readonly("mean", &ParameterSummary::mean)
      .def_readonly("quantile_low", &ParameterSummary::quantile_low)
      .def_readonly("quantile_high", &ParameterSummary::quantile_high);

  py::class_<McSummary>(m, "McSummary")
      .def_readonly("n_ok", &McSummary::n_ok)
      .def_readonly("n_failed", &McSummary::n_failed)
      .def_readonly("theta", &McSummary::theta)
      .def_readonly("beta", &McSummary::beta)
      .def_readonly("wall_seconds", &McSummary::wall_seconds)
      .def("theta_estimates", &McSummary::theta_estimates)
      .def("beta_estimates", &McSummary::beta_estimates);

  m.def("run_replication", &run_replication, py::arg("config"), py::arg("rep_id"));
  m.def("mc_study", &mc_study, py::arg("config"), py::call_guard<py::gil_scoped_release>());

  py::class_<SweepPoint>(m, "SweepPoint")
      .def_readonly("value", &SweepPoint::value)
      .def_readonly("median_abs_err_theta", &SweepPoint::median_abs_err_theta)
      .def_readonly("median_abs_err_beta", &SweepPoint::median_abs_err_beta)
      .def_readonly("median_abs_j1", &SweepPoint::median_abs_j1)
      .def_readonly("n_ok", &SweepPoint::n_ok)
      .def_readonly("n_failed", &SweepPoint::n_failed);

  m.def(
      "consistency_sweep",
      [](const StudyConfig& c, const std::string& axis, std::vector<double> values) {
        return consistency_sweep(c, parse_sweep_axis(axis), values);
      },
      py::arg("config"), py::arg("axis"), py::arg("values"));

  py::class_<TrajectoryBundle>(m, "TrajectoryBundle")
      .def_readonly("times", &TrajectoryBundle::times)
      .def_readonly("xi", &TrajectoryBundle::xi)
      .def_readonly("series", &TrajectoryBundle::series);
  m.def(
      "trajectory_bundle",
      [](const StudyConfig& c, std::vector<double> xi) { return trajectory_bundle(c, xi); },
      py::arg("config"), py::arg("xi_list"));

  m.def(
      "main",
      [](std::vector<std::string> args) {
        std::vector<const char*> argv{"spdemove"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream err;
        const int code = cli::dispatch(static_cast<int>(argv.size()), argv.data(), err);
        return py::make_tuple(code, err.str());
      },
      py::arg("args"), "Run the command-line interface; returns (exit_code, stderr_text).");
}
