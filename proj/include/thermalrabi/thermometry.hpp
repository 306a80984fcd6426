#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "thermalrabi/rabi_distribution.hpp"

namespace thermalrabi {

struct TracePoint {
  double duration = 0.0;   // s
  double p_excited = 0.0;  // probability
  double std_err = 0.0;    // probability
  int n_shots = 200;
};

// Carrier Rabi-oscillation trace: excitation probability versus square
// pulse duration.
struct RabiTrace {
  std::vector<TracePoint> points;
};

enum class FitMode {
  coupled,  // omega0 tied to tau_max and b through the peak-time relation
  joint,    // coupled start, then a free two-parameter (omega0, b) polish
};

struct ThermometryResult {
  double tau_max = 0.0;  // s
  double tau_max_err = 0.0;
  double omega0 = 0.0;  // rad/s
  double omega0_err = 0.0;
  double b = 0.0;
  double b_err = 0.0;
  double temperature_over_td = 0.0;
  double temperature_err_over_td = 0.0;
  double sse = 0.0;  // shot-noise-weighted sum of squared residuals
  bool envelope_flat = false;  // b pinned at the lower bracket
  FitMode mode = FitMode::coupled;
  // Calibration provenance.
  double calibration_c = 0.0;
  double doppler_temperature = 0.0;  // K
};

// Cubic power calibration: drive amplitude in device units -> bare Rabi
// frequency in rad/s. Monotonic over [amp_min, amp_max] by construction.
struct PowerCalibration {
  std::vector<double> coefficients;  // ascending powers
  double amp_min = 0.0;
  double amp_max = 0.0;

  // Clamps out-of-range amplitudes to the calibrated interval; *clamped
  // reports whether that happened.
  double omega0_at(double amplitude, bool* clamped = nullptr) const;
};

// First interior maximum of the trace, refined by parabolic interpolation
// through the peak sample and its neighbours.
double find_tau_max(const RabiTrace& trace);

// Fits the effective-distribution model to a measured trace and converts
// the shape parameter b to a temperature via the supplied calibration.
ThermometryResult fit_thermal_rabi(const RabiTrace& trace,
                                   const TemperatureCalibration& calibration,
                                   FitMode mode = FitMode::coupled);

struct CalibrationInput {
  double amplitude = 0.0;  // device units
  double omega0 = 0.0;     // rad/s
};

PowerCalibration fit_power_calibration(
    const std::vector<CalibrationInput>& points);

// Model trace generator used by tests and the fit round trips. With a
// seed, per-point excitation counts are binomial draws at n_shots;
// without one the model values are returned directly.
RabiTrace synthesize_trace(double omega0, double b, double t_end,
                           std::size_t n_points, int n_shots,
                           std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace thermalrabi
