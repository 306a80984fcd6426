#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "thermalrabi/rabi_distribution.hpp"

namespace thermalrabi {

// One piecewise-constant pulse segment. Amplitude and detuning are angular
// (rad/s); a chirp in ordinary Hz r_c enters as delta = pi r_c t / tau_sigma.
struct PulseSample {
  double duration = 0.0;        // s
  double rabi_amplitude = 0.0;  // rad/s
  double detuning = 0.0;        // rad/s
};

struct PulseMetadata {
  double omega0_cal = 0.0;     // rad/s
  double tau_sigma = 0.0;      // s
  double chirp_range_hz = 0.0; // ordinary Hz
  std::size_t n_samples = 0;
};

struct PulseProgram {
  std::vector<PulseSample> samples;
  PulseMetadata metadata;
};

// Two-level amplitudes (ground, excited). Norm 1 within 1e-12.
struct QubitAmplitudes {
  std::complex<double> c_g{1.0, 0.0};
  std::complex<double> c_e{0.0, 0.0};
};

QubitAmplitudes make_qubit_amplitudes(std::complex<double> c_g,
                                      std::complex<double> c_e);

struct TransferResult {
  double p_excited = 0.0;
  double infidelity = 1.0;
  double log10_infidelity = 0.0;  // infidelity floored at 1e-12
};

// Thermally averaged square-pulse excitation from the exact discrete
// distribution: sum_k p_k (1 - cos(Omega_k t)) / 2.
double square_pulse_exact(const DiscreteRabiDistribution& dist, double t);

// Same average under the model density, evaluated by Gauss-Legendre
// quadrature in the substituted variable v = ((Omega0-Omega)/(b^2 Omega))^(1/4).
// b = 0 reduces to sin^2(Omega0 t / 2).
double square_pulse_effective(const EffectiveRabiDistribution& dist, double t,
                              int quad_nodes = 1024);

// Batched evaluation sharing one node table across all times; same values
// as the scalar overload.
std::vector<double> square_pulse_effective(const EffectiveRabiDistribution& dist,
                                           const std::vector<double>& times,
                                           int quad_nodes = 1024);

// Gaussian-amplitude, linearly chirped pulse truncated at +-2 tau_sigma and
// discretized into n piecewise-constant samples evaluated at midpoints:
//   Omega(t) = omega0_cal exp(-t^2 / (2 tau_sigma^2)),
//   delta(t) = pi chirp_range_hz t / tau_sigma.
PulseProgram build_rap_pulse(double omega0_cal, double tau_sigma,
                             double chirp_range_hz,
                             std::size_t n_samples = 50);

// Propagate through the pulse with amplitude scaling factors x (thermal)
// and y (static calibration error) and a constant detuning offset, using
// the exact 2x2 unitary of each constant segment.
QubitAmplitudes propagate(const PulseProgram& pulse, double x, double y,
                          double delta_prime,
                          const QubitAmplitudes& initial = {});

// Average |c_e|^2 over the thermal amplitude factor x on the midpoint grid
// {dx/2, 3dx/2, ...} in (0, 1], weighted by the model density at x Omega0.
TransferResult thermal_average_transfer(const PulseProgram& pulse,
                                        const EffectiveRabiDistribution& dist,
                                        double y, double delta_prime,
                                        double dx = 0.01);

// Same average with explicit relative amplitudes and weights; exposed so
// the exact discrete distribution can stand in for the model weights.
TransferResult weighted_average_transfer(const PulseProgram& pulse,
                                         const std::vector<double>& x,
                                         const std::vector<double>& weight,
                                         double y, double delta_prime);

}  // namespace thermalrabi
