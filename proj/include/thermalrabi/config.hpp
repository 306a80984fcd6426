#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "thermalrabi/mode_spectrum.hpp"
#include "thermalrabi/rabi_distribution.hpp"
#include "thermalrabi/robustness.hpp"
#include "thermalrabi/thermometry.hpp"

namespace thermalrabi {

inline constexpr int config_schema_version = 1;

// Fully resolved run configuration. Exactly one of temperature and b is
// set; subcommands that need the other convert through the calibration or
// refuse with a config_error.
struct RunConfig {
  std::string preset;  // empty when built field by field

  LaserGeometry geometry = reference_geometry();
  std::vector<double> mode_frequencies = reference_mode_frequencies();
  double doppler_temperature = reference_doppler_temperature;  // K
  std::optional<double> temperature;                           // K
  std::optional<double> b;

  double omega0 = two_pi * 104.9e3;  // bare Rabi frequency, rad/s
  DistributionNumerics numerics;

  double calibration_c = 4.0e6;
  std::vector<double> calibration_grid =  // T / T_D
      {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};

  double pulse_omega0_cal = two_pi * 105.0e3;  // rad/s
  double pulse_tau_sigma = 50.0e-6;            // s
  double pulse_chirp_range_hz = 100.0e3;       // ordinary Hz
  std::size_t pulse_n_samples = 50;

  SweepWindow window;
  double dx = 0.01;

  std::vector<double> scan_chirp_ranges_hz = {0.0, 50.0e3, 100.0e3, 150.0e3};
  std::vector<double> scan_amplitudes;  // rad/s; empty = unset

  double rabi_t_max = 50.0e-6;  // s
  std::size_t rabi_n_points = 200;

  FitMode fit_mode = FitMode::coupled;

  // Shape parameter for the effective model: b when given, otherwise
  // sqrt(T / (c T_D)) through the calibration.
  double model_b() const;
};

// Parse and validate a JSON config. Unknown keys, type mismatches, a
// missing temperature/b choice, and out-of-range values raise config_error
// naming the offending field. preset expands before field overrides apply,
// so a preset plus explicit fields is valid.
RunConfig parse_config(const std::string& json_text,
                       std::string_view source = "config");

// Named presets mirroring the reference setup: "base" (thermal state at
// 1.1 mK with the 105 kHz drive) and the robustness-map windows "map-fine"
// (unchirped 332 kHz pulse over the low-amplitude strip), "map-chirped"
// (221 kHz, 100 kHz chirp), "map-fast-chirp" (332 kHz, 150 kHz chirp).
RunConfig preset_config(std::string_view name);

// Canonical resolved form: every field, sorted keys, shortest round-trip
// numbers. Equal configs hash equal regardless of input formatting.
std::string canonical_config_json(const RunConfig& config);
std::uint64_t config_hash(const RunConfig& config);

}  // namespace thermalrabi
