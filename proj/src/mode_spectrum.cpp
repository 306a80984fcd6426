#include "thermalrabi/mode_spectrum.hpp"

#include <cmath>
#include <string>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"

namespace thermalrabi {

LaserGeometry make_laser_geometry(double wavelength, double ion_mass,
                                  std::vector<double> projection_angles) {
  if (!(wavelength > 0.0))
    throw domain_error("geometry: wavelength must be > 0");
  if (!(ion_mass > 0.0)) throw domain_error("geometry: ion mass must be > 0");
  if (projection_angles.empty())
    throw domain_error("geometry: need at least one projection angle");
  for (double a : projection_angles)
    if (!(a >= 0.0 && a <= pi / 2.0))
      throw domain_error("geometry: projection angles must be in [0, pi/2]");
  return LaserGeometry{wavelength, ion_mass, std::move(projection_angles)};
}

double lamb_dicke(const LaserGeometry& geometry, std::size_t mode_index,
                  double angular_frequency) {
  if (mode_index >= geometry.projection_angles.size())
    throw domain_error("lamb_dicke: mode index out of range");
  if (!(angular_frequency > 0.0))
    throw domain_error("lamb_dicke: mode frequency must be > 0");
  double k = two_pi / geometry.wavelength;
  double x0 = std::sqrt(hbar / (2.0 * geometry.ion_mass * angular_frequency));
  return std::cos(geometry.projection_angles[mode_index]) * k * x0;
}

double mean_occupation(double temperature, double angular_frequency) {
  if (!(temperature >= 0.0))
    throw domain_error("mean_occupation: temperature must be >= 0");
  if (!(angular_frequency > 0.0))
    throw domain_error("mean_occupation: mode frequency must be > 0");
  return boltzmann_constant * temperature / (hbar * angular_frequency);
}

double thermal_probability(long n, double n_bar) {
  if (n < 0) throw domain_error("thermal_probability: n must be >= 0");
  if (!(n_bar >= 0.0)) throw domain_error("thermal_probability: n_bar < 0");
  if (n_bar == 0.0) return n == 0 ? 1.0 : 0.0;
  // n_bar^n / (n_bar+1)^(n+1), evaluated in logs for large n.
  double lp = n * std::log(n_bar / (n_bar + 1.0)) - std::log(n_bar + 1.0);
  return std::exp(lp);
}

ModeSet make_mode_set(const LaserGeometry& geometry,
                      const std::vector<double>& angular_frequencies,
                      double temperature) {
  if (angular_frequencies.size() != geometry.projection_angles.size())
    throw domain_error("mode set: one frequency per projection angle");
  ModeSet set;
  set.modes.reserve(angular_frequencies.size());
  for (std::size_t i = 0; i < angular_frequencies.size(); ++i) {
    Mode m;
    m.angular_frequency = angular_frequencies[i];
    m.lamb_dicke = lamb_dicke(geometry, i, angular_frequencies[i]);
    m.mean_occupation = mean_occupation(temperature, angular_frequencies[i]);
    m.expansion_valid = m.lamb_dicke * std::sqrt(m.mean_occupation) < 1.0;
    set.modes.push_back(m);
  }
  return set;
}

double projection_angle_for_target(double wavelength, double ion_mass,
                                   double angular_frequency,
                                   double eta_target) {
  LaserGeometry g = make_laser_geometry(wavelength, ion_mass, {0.0});
  double eta_max = lamb_dicke(g, 0, angular_frequency);
  if (!(eta_target > 0.0 && eta_target <= eta_max))
    throw domain_error("projection angle: target eta out of reach, max " +
                       std::to_string(eta_max));
  return std::acos(eta_target / eta_max);
}

LaserGeometry reference_geometry() {
  double lambda = 729e-9;
  double mass = 40.0 * atomic_mass_unit;
  double a_ax = pi / 4.0;
  double a_r1 = projection_angle_for_target(lambda, mass,
                                            angular_from_hz(2.4e6), 0.031);
  double a_r2 = projection_angle_for_target(lambda, mass,
                                            angular_from_hz(3.0e6), 0.028);
  return make_laser_geometry(lambda, mass, {a_ax, a_r1, a_r2});
}

std::vector<double> reference_mode_frequencies() {
  return {angular_from_hz(1.35e6), angular_from_hz(2.4e6),
          angular_from_hz(3.0e6)};
}

}  // namespace thermalrabi
