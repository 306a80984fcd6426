#pragma once

#include <cstddef>
#include <vector>

namespace thermalrabi {

// Laser beam geometry relative to the trap axes. One projection angle per
// motional mode; angles in radians, wavelength in m, mass in kg.
struct LaserGeometry {
  double wavelength = 0.0;
  double ion_mass = 0.0;
  std::vector<double> projection_angles;
};

LaserGeometry make_laser_geometry(double wavelength, double ion_mass,
                                  std::vector<double> projection_angles);

struct Mode {
  double angular_frequency = 0.0;  // rad/s
  double lamb_dicke = 0.0;
  double mean_occupation = 0.0;
  // False when eta * sqrt(n_bar) >= 1, i.e. the second-order expansion of
  // the coupling starts to break down. A warning, not an error.
  bool expansion_valid = true;
};

struct ModeSet {
  std::vector<Mode> modes;
};

// eta_i = cos(alpha_i) * (2 pi / lambda) * sqrt(hbar / (2 m omega_i))
double lamb_dicke(const LaserGeometry& geometry, std::size_t mode_index,
                  double angular_frequency);

// High-temperature thermal occupation n_bar = k_B T / (hbar omega).
double mean_occupation(double temperature, double angular_frequency);

// Boltzmann weight p(n) = n_bar^n / (n_bar + 1)^(n+1).
double thermal_probability(long n, double n_bar);

ModeSet make_mode_set(const LaserGeometry& geometry,
                      const std::vector<double>& angular_frequencies,
                      double temperature);

// Projection angle that reproduces a target Lamb-Dicke factor at a given
// mode frequency for this wavelength and mass.
double projection_angle_for_target(double wavelength, double ion_mass,
                                   double angular_frequency,
                                   double eta_target);

// Reference setup: a single 40-amu ion, 729 nm quadrupole laser at 45 deg
// to the axial mode, radial angles fixed by the measured Lamb-Dicke
// factors {0.059, 0.031, 0.028} at {1.35, 2.4, 3.0} MHz.
LaserGeometry reference_geometry();
std::vector<double> reference_mode_frequencies();  // angular, rad/s
inline constexpr double reference_doppler_temperature = 0.55e-3;  // K

}  // namespace thermalrabi
