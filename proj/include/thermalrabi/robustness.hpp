#pragma once

#include <cstddef>
#include <vector>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/dynamics.hpp"
#include "thermalrabi/rabi_distribution.hpp"

namespace thermalrabi {

// Rectangular sweep window for the robustness map. y is the dimensionless
// amplitude scale factor, delta the static detuning offset in rad/s.
struct SweepWindow {
  double y_min = 0.5;
  double y_max = 1.5;
  double delta_min = -1.5 * two_pi * 1.0e5;
  double delta_max = 1.5 * two_pi * 1.0e5;
  std::size_t n_y = 61;
  std::size_t n_delta = 61;
};

// Thermally averaged RAP infidelity over a (y, delta') grid. values[i][j]
// is log10(1 - p_excited) at y_axis[i], delta_axis[j], clipped at 1e-12
// before the log. delta_reference is the axis unit used when reporting
// detunings in chirp-range units.
struct RobustnessMap {
  std::vector<double> y_axis;
  std::vector<double> delta_axis;  // rad/s
  std::vector<std::vector<double>> values;
  PulseMetadata pulse;
  double omega0 = 0.0;  // thermal distribution bare frequency, rad/s
  double b = 0.0;
  double dx = 0.0;
  double delta_reference = two_pi * 1.0e5;  // rad/s
};

// Evaluates thermal_average_transfer on every grid point. Rows are
// distributed over threads (0 = hardware concurrency); the output is
// bit-identical for any thread count.
RobustnessMap sweep_robustness(const PulseProgram& pulse,
                               const EffectiveRabiDistribution& eff,
                               const SweepWindow& window, double dx = 0.01,
                               unsigned threads = 0);

// Smallest infidelity on the map (not in log form).
double map_minimum_infidelity(const RobustnessMap& map);

// Transfer out of the wrong qubit state: the pulse seen at a constant
// detuning offset far outside its bandwidth. offset must exceed five
// times the largest |detuning| + amplitude over the samples.
TransferResult parasitic_transfer_check(const PulseProgram& pulse,
                                        const EffectiveRabiDistribution& eff,
                                        double offset, double dx = 0.01);

}  // namespace thermalrabi
