#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "thermalrabi/cli.hpp"
#include "thermalrabi/config.hpp"
#include "thermalrabi/constants.hpp"
#include "thermalrabi/dynamics.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/mode_spectrum.hpp"
#include "thermalrabi/rabi_distribution.hpp"
#include "thermalrabi/robustness.hpp"
#include "thermalrabi/serialization.hpp"
#include "thermalrabi/thermometry.hpp"

namespace py = pybind11;
using namespace thermalrabi;

PYBIND11_MODULE(_core, m) {
  m.doc() = "laser-driven two-level ion qubit under a thermally fluctuating "
            "Rabi frequency";

  py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<fit_error>(m, "FitError", PyExc_RuntimeError);
  py::register_exception<resource_error>(m, "ResourceError", PyExc_RuntimeError);
  py::register_exception<config_error>(m, "ConfigError", PyExc_ValueError);

  m.attr("__version__") = THERMALRABI_VERSION;
  m.attr("TWO_PI") = two_pi;
  m.attr("REFERENCE_DOPPLER_TEMPERATURE") = reference_doppler_temperature;

  py::class_<LaserGeometry>(m, "LaserGeometry")
      .def(py::init(&make_laser_geometry), py::arg("wavelength"),
           py::arg("ion_mass"), py::arg("projection_angles"))
      .def_readonly("wavelength", &LaserGeometry::wavelength)
      .def_readonly("ion_mass", &LaserGeometry::ion_mass)
      .def_readonly("projection_angles", &LaserGeometry::projection_angles);

  py::class_<Mode>(m, "Mode")
      .def_readonly("angular_frequency", &Mode::angular_frequency)
      .def_readonly("lamb_dicke", &Mode::lamb_dicke)
      .def_readonly("mean_occupation", &Mode::mean_occupation)
      .def_readonly("expansion_valid", &Mode::expansion_valid);

  py::class_<ModeSet>(m, "ModeSet")
      .def_readonly("modes", &ModeSet::modes);

  m.def("reference_geometry", &reference_geometry);
  m.def("reference_mode_frequencies", &reference_mode_frequencies);
  m.def("lamb_dicke", &lamb_dicke, py::arg("geometry"), py::arg("mode_index"),
        py::arg("angular_frequency"));
  m.def("mean_occupation", &mean_occupation, py::arg("temperature"),
        py::arg("angular_frequency"));
  m.def("thermal_probability", &thermal_probability, py::arg("n"),
        py::arg("n_bar"));
  m.def("make_mode_set", &make_mode_set, py::arg("geometry"),
        py::arg("angular_frequencies"), py::arg("temperature"));
  m.def("carrier_matrix_element", &carrier_matrix_element, py::arg("n"),
        py::arg("eta"));

  py::class_<RabiPoint>(m, "RabiPoint")
      .def_readonly("omega", &RabiPoint::omega)
      .def_readonly("probability", &RabiPoint::probability);

  py::class_<DiscreteRabiDistribution>(m, "DiscreteRabiDistribution")
      .def_readonly("points", &DiscreteRabiDistribution::points)
      .def_readonly("omega0", &DiscreteRabiDistribution::omega0)
      .def_readonly("truncation_deficit",
                    &DiscreteRabiDistribution::truncation_deficit);

  py::class_<SmoothedDistribution>(m, "SmoothedDistribution")
      .def_readonly("grid", &SmoothedDistribution::grid)
      .def_readonly("density", &SmoothedDistribution::density)
      .def_readonly("sigma", &SmoothedDistribution::sigma)
      .def_readonly("omega0", &SmoothedDistribution::omega0);

  py::class_<EffectiveRabiDistribution>(m, "EffectiveRabiDistribution")
      .def_readonly("omega0", &EffectiveRabiDistribution::omega0)
      .def_readonly("b", &EffectiveRabiDistribution::b);

  py::class_<BFitResult>(m, "BFitResult")
      .def_readonly("b", &BFitResult::b)
      .def_readonly("residual", &BFitResult::residual);

  py::class_<CalibrationPoint>(m, "CalibrationPoint")
      .def_readonly("t_over_td", &CalibrationPoint::t_over_td)
      .def_readonly("b", &CalibrationPoint::b);

  py::class_<TemperatureCalibration>(m, "TemperatureCalibration")
      .def(py::init([](double c, double doppler_temperature) {
             TemperatureCalibration cal;
             cal.c = c;
             cal.doppler_temperature = doppler_temperature;
             return cal;
           }),
           py::arg("c"), py::arg("doppler_temperature"))
      .def_readonly("c", &TemperatureCalibration::c)
      .def_readonly("doppler_temperature",
                    &TemperatureCalibration::doppler_temperature)
      .def_readonly("fit_residual", &TemperatureCalibration::fit_residual)
      .def_readonly("r_squared", &TemperatureCalibration::r_squared)
      .def_readonly("r_squared_centered",
                    &TemperatureCalibration::r_squared_centered)
      .def_readonly("points", &TemperatureCalibration::points);

  m.def("enumerate_distribution", &enumerate_distribution, py::arg("modes"),
        py::arg("omega0"), py::arg("eps_trunc") = 1e-4,
        py::arg("max_tuples") = 100000000);
  m.def("smooth_distribution", &smooth_distribution, py::arg("dist"),
        py::arg("sigma"), py::arg("grid_points") = 4001);
  m.def("make_effective_distribution", &make_effective_distribution,
        py::arg("omega0"), py::arg("b"));
  m.def("effective_pdf", &effective_pdf, py::arg("omega"), py::arg("dist"));
  m.def("fit_b", &fit_b, py::arg("smoothed"), py::arg("omega0"));
  m.def("calibrate_c", &calibrate_c, py::arg("geometry"),
        py::arg("mode_angular_frequencies"), py::arg("doppler_temperature"),
        py::arg("temperature_grid"),
        py::arg("numerics") = DistributionNumerics{});
  m.def("omega0_from_tau_max", &omega0_from_tau_max, py::arg("tau_max"),
        py::arg("b"));
  m.def("effective_pdf_argmax", &effective_pdf_argmax, py::arg("omega0"),
        py::arg("b"));

  m.def("square_pulse_exact", &square_pulse_exact, py::arg("dist"),
        py::arg("t"));
  m.def("square_pulse_effective",
        py::overload_cast<const EffectiveRabiDistribution&, double, int>(
            &square_pulse_effective),
        py::arg("dist"), py::arg("t"), py::arg("quad_nodes") = 1024);

  py::class_<PulseMetadata>(m, "PulseMetadata")
      .def_readonly("omega0_cal", &PulseMetadata::omega0_cal)
      .def_readonly("tau_sigma", &PulseMetadata::tau_sigma)
      .def_readonly("chirp_range_hz", &PulseMetadata::chirp_range_hz)
      .def_readonly("n_samples", &PulseMetadata::n_samples);

  py::class_<PulseProgram>(m, "PulseProgram")
      .def_readonly("metadata", &PulseProgram::metadata)
      .def("__len__",
           [](const PulseProgram& p) { return p.samples.size(); });

  py::class_<TransferResult>(m, "TransferResult")
      .def_readonly("p_excited", &TransferResult::p_excited)
      .def_readonly("infidelity", &TransferResult::infidelity)
      .def_readonly("log10_infidelity", &TransferResult::log10_infidelity);

  m.def("build_rap_pulse", &build_rap_pulse, py::arg("omega0_cal"),
        py::arg("tau_sigma"), py::arg("chirp_range_hz"),
        py::arg("n_samples") = 50);
  m.def(
      "transfer_probability",
      [](const PulseProgram& pulse, double x, double y, double delta_prime) {
        QubitAmplitudes a = propagate(pulse, x, y, delta_prime);
        return std::norm(a.c_e);
      },
      py::arg("pulse"), py::arg("x"), py::arg("y"), py::arg("delta_prime"));
  m.def("thermal_average_transfer", &thermal_average_transfer,
        py::arg("pulse"), py::arg("dist"), py::arg("y"),
        py::arg("delta_prime"), py::arg("dx") = 0.01);

  py::class_<SweepWindow>(m, "SweepWindow")
      .def(py::init<>())
      .def_readwrite("y_min", &SweepWindow::y_min)
      .def_readwrite("y_max", &SweepWindow::y_max)
      .def_readwrite("delta_min", &SweepWindow::delta_min)
      .def_readwrite("delta_max", &SweepWindow::delta_max)
      .def_readwrite("n_y", &SweepWindow::n_y)
      .def_readwrite("n_delta", &SweepWindow::n_delta);

  py::class_<RobustnessMap>(m, "RobustnessMap")
      .def_readonly("y_axis", &RobustnessMap::y_axis)
      .def_readonly("delta_axis", &RobustnessMap::delta_axis)
      .def_readonly("values", &RobustnessMap::values)
      .def_readonly("b", &RobustnessMap::b)
      .def_readonly("dx", &RobustnessMap::dx);

  m.def("sweep_robustness", &sweep_robustness, py::arg("pulse"),
        py::arg("eff"), py::arg("window"), py::arg("dx") = 0.01,
        py::arg("threads") = 0);
  m.def("map_minimum_infidelity", &map_minimum_infidelity, py::arg("map"));
  m.def("parasitic_transfer_check", &parasitic_transfer_check,
        py::arg("pulse"), py::arg("eff"), py::arg("offset"),
        py::arg("dx") = 0.01);

  py::class_<TracePoint>(m, "TracePoint")
      .def(py::init([](double duration, double p_excited, double std_err,
                       int n_shots) {
             TracePoint pt;
             pt.duration = duration;
             pt.p_excited = p_excited;
             pt.std_err = std_err;
             pt.n_shots = n_shots;
             return pt;
           }),
           py::arg("duration"), py::arg("p_excited"), py::arg("std_err") = 0.0,
           py::arg("n_shots") = 200)
      .def_readonly("duration", &TracePoint::duration)
      .def_readonly("p_excited", &TracePoint::p_excited)
      .def_readonly("std_err", &TracePoint::std_err)
      .def_readonly("n_shots", &TracePoint::n_shots);

  py::class_<RabiTrace>(m, "RabiTrace")
      .def(py::init([](std::vector<TracePoint> points) {
             RabiTrace tr;
             tr.points = std::move(points);
             return tr;
           }),
           py::arg("points"))
      .def_readonly("points", &RabiTrace::points);

  py::enum_<FitMode>(m, "FitMode")
      .value("coupled", FitMode::coupled)
      .value("joint", FitMode::joint);

  py::class_<ThermometryResult>(m, "ThermometryResult")
      .def_readonly("tau_max", &ThermometryResult::tau_max)
      .def_readonly("tau_max_err", &ThermometryResult::tau_max_err)
      .def_readonly("omega0", &ThermometryResult::omega0)
      .def_readonly("omega0_err", &ThermometryResult::omega0_err)
      .def_readonly("b", &ThermometryResult::b)
      .def_readonly("b_err", &ThermometryResult::b_err)
      .def_readonly("temperature_over_td",
                    &ThermometryResult::temperature_over_td)
      .def_readonly("temperature_err_over_td",
                    &ThermometryResult::temperature_err_over_td)
      .def_readonly("sse", &ThermometryResult::sse)
      .def_readonly("envelope_flat", &ThermometryResult::envelope_flat)
      .def_readonly("mode", &ThermometryResult::mode);

  m.def("find_tau_max", &find_tau_max, py::arg("trace"));
  m.def("fit_thermal_rabi", &fit_thermal_rabi, py::arg("trace"),
        py::arg("calibration"), py::arg("mode") = FitMode::coupled);
  m.def(
      "synthesize_trace",
      [](double omega0, double b, double t_end, std::size_t n_points,
         int n_shots, std::optional<std::uint64_t> seed) {
        return synthesize_trace(omega0, b, t_end, n_points, n_shots, seed);
      },
      py::arg("omega0"), py::arg("b"), py::arg("t_end"), py::arg("n_points"),
      py::arg("n_shots") = 200, py::arg("seed") = std::nullopt);

  m.def(
      "read_trace_csv",
      [](const std::string& text, const std::string& source) {
        std::istringstream in(text);
        return read_trace_csv(in, source);
      },
      py::arg("text"), py::arg("source") = "trace csv");
  m.def("parse_config_json", [](const std::string& text) {
    RunConfig cfg = parse_config(text);
    return canonical_config_json(cfg);
  });
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("thermalrabi");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  });
}
