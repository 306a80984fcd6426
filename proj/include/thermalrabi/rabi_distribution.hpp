#pragma once

#include <cstddef>
#include <vector>

#include "thermalrabi/mode_spectrum.hpp"

namespace thermalrabi {

struct RabiPoint {
  double omega = 0.0;        // rad/s
  double probability = 0.0;
};

// Exact carrier Rabi-frequency distribution from enumerating thermal Fock
// states over all modes. Probabilities sum to 1 - truncation_deficit.
struct DiscreteRabiDistribution {
  std::vector<RabiPoint> points;
  double omega0 = 0.0;             // bare Rabi frequency, rad/s
  double truncation_deficit = 0.0;
};

// Gaussian-smoothed density of the discrete distribution on a uniform grid.
struct SmoothedDistribution {
  std::vector<double> grid;     // rad/s
  std::vector<double> density;  // (rad/s)^-1
  double sigma = 0.0;
  double omega0 = 0.0;
  double truncation_deficit = 0.0;
};

// Two-parameter model density
//   w_b(Omega) = N ((Omega0 - Omega)/Omega)^4
//                exp(-(((Omega0 - Omega)/(b^2 Omega)))^(1/4))
// on (0, Omega0]. b = 0 denotes the degenerate coherent case (delta at
// Omega0); averaging operations short-circuit on it.
struct EffectiveRabiDistribution {
  double omega0 = 0.0;
  double b = 0.0;
  double normalization = 0.0;  // N in (rad/s)^-1, 0 for b == 0
};

struct BFitResult {
  double b = 0.0;
  double residual = 0.0;  // sqrt(SSE / sum density^2), dimensionless
};

struct CalibrationPoint {
  double t_over_td = 0.0;
  double b = 0.0;
};

// Proportionality T / T_D = c b^2 from a through-origin regression over a
// temperature grid.
struct TemperatureCalibration {
  double c = 0.0;
  double doppler_temperature = 0.0;  // K
  double fit_residual = 0.0;         // rms of y - c x over the grid
  // Coefficient of determination in the uncentered convention, the
  // standard for through-origin models; the centered value is kept too.
  double r_squared = 0.0;
  double r_squared_centered = 0.0;
  std::vector<CalibrationPoint> points;
};

// Numeric knobs shared by the enumerate -> smooth -> fit pipeline.
struct DistributionNumerics {
  double eps_trunc = 1e-4;
  double sigma_over_omega0 = 1e-3;
  std::size_t grid_points = 4001;
  std::size_t max_tuples = 100000000;
};

// Carrier coupling matrix element <n|e^{i eta (a + a^dag)}|n| relative to
// the bare coupling: exp(-eta^2/2) L_n(eta^2). Signed; callers take the
// magnitude. Evaluated by the three-term Laguerre recurrence.
double carrier_matrix_element(long n, double eta);

// Enumerate all Fock-number tuples inside the per-mode truncation box.
// Per-mode cutoffs keep cumulative thermal mass >= (1-eps)^(1/n_modes).
DiscreteRabiDistribution enumerate_distribution(
    const ModeSet& modes, double omega0, double eps_trunc = 1e-4,
    std::size_t max_tuples = 100000000);

// Merge nearby points by mass-weighted centroid binning. Used to bound the
// cost of downstream sums; binning error in omega is below span/n_bins.
DiscreteRabiDistribution compact_distribution(
    const DiscreteRabiDistribution& dist, std::size_t n_bins);

SmoothedDistribution smooth_distribution(const DiscreteRabiDistribution& dist,
                                         double sigma,
                                         std::size_t grid_points = 4001);

EffectiveRabiDistribution make_effective_distribution(double omega0, double b);

// Normalization constant N such that the model density integrates to 1
// over (0, Omega0]. Relative accuracy 1e-8 or a numeric_error.
double normalize_pdf(double omega0, double b);

// Model density at omega in (0, omega0]; exactly 0 at omega0. Arguments
// off the support are domain errors. For b == 0 the density is singular
// and this returns 0 almost everywhere.
double effective_pdf(double omega, const EffectiveRabiDistribution& dist);

// Least-squares fit of b to a smoothed density, minimized over log b in
// [1e-6, 1e-1] by Brent's method; boundary solutions are errors.
BFitResult fit_b(const SmoothedDistribution& smoothed, double omega0);

// Run the pipeline over a temperature grid and regress T/T_D on b^2
// through the origin.
TemperatureCalibration calibrate_c(
    const LaserGeometry& geometry,
    const std::vector<double>& mode_angular_frequencies,
    double doppler_temperature, const std::vector<double>& temperature_grid,
    const DistributionNumerics& numerics = {});

// Invert tau_max = (pi / Omega0) (1 + 2^16 b^2).
double omega0_from_tau_max(double tau_max, double b);

// Location of the model density maximum, Omega0 / (1 + 2^16 b^2).
double effective_pdf_argmax(double omega0, double b);

}  // namespace thermalrabi
