#include "thermalrabi/rabi_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/numerics.hpp"

namespace thermalrabi {

namespace {

// Upper cutoff for the v-substituted model integrals; the v^19 e^-v tail
// beyond 120 is ~1e-30 of the total.
constexpr double kVMax = 120.0;

double model_integrand(double v, double b) {
  if (v <= 0.0) return 0.0;
  double d = 1.0 + b * b * v * v * v * v;
  return std::exp(19.0 * std::log(v) - v) / (d * d);
}

}  // namespace

double carrier_matrix_element(long n, double eta) {
  if (n < 0) throw domain_error("carrier_matrix_element: n must be >= 0");
  if (!(eta >= 0.0 && eta < 1.0))
    throw domain_error("carrier_matrix_element: eta must be in [0, 1)");
  double x = eta * eta;
  double lk = 1.0;  // L_0
  if (n >= 1) {
    double lkm1 = 1.0;
    lk = 1.0 - x;  // L_1
    for (long k = 1; k < n; ++k) {
      double lkp1 = ((2.0 * k + 1.0 - x) * lk - k * lkm1) / (k + 1.0);
      lkm1 = lk;
      lk = lkp1;
    }
  }
  return std::exp(-0.5 * x) * lk;
}

DiscreteRabiDistribution enumerate_distribution(const ModeSet& modes,
                                                double omega0,
                                                double eps_trunc,
                                                std::size_t max_tuples) {
  if (!(omega0 > 0.0)) throw domain_error("enumerate: omega0 must be > 0");
  if (!(eps_trunc > 0.0 && eps_trunc < 0.1))
    throw domain_error("enumerate: eps_trunc must be in (0, 0.1)");
  if (modes.modes.empty()) throw domain_error("enumerate: no modes");

  std::size_t n_modes = modes.modes.size();
  double per_mode_target = std::pow(1.0 - eps_trunc, 1.0 / n_modes);

  std::vector<std::vector<double>> elem(n_modes), prob(n_modes);
  std::size_t box = 1;
  for (std::size_t i = 0; i < n_modes; ++i) {
    const Mode& m = modes.modes[i];
    double cum = 0.0;
    long n = 0;
    for (;; ++n) {
      double p = thermal_probability(n, m.mean_occupation);
      prob[i].push_back(p);
      elem[i].push_back(carrier_matrix_element(n, m.lamb_dicke));
      cum += p;
      if (cum >= per_mode_target) break;
      if (n > 2000000)
        throw numeric_error("enumerate: cutoff search did not terminate");
    }
    if (box > max_tuples / prob[i].size())
      throw resource_error(
          "enumerate: truncation box exceeds " +
          std::to_string(max_tuples) +
          " tuples; raise eps_trunc or lower the temperature");
    box *= prob[i].size();
  }

  DiscreteRabiDistribution dist;
  dist.omega0 = omega0;
  dist.points.reserve(box);

  // Odometer over the box, depth-first so mode 0 is the slowest index.
  std::vector<double> amp(n_modes + 1, 1.0), pr(n_modes + 1, 1.0);
  std::vector<std::size_t> idx(n_modes, 0);
  std::size_t level = 0;
  for (;;) {
    if (level == n_modes) {
      dist.points.push_back(
          RabiPoint{omega0 * std::abs(amp[n_modes]), pr[n_modes]});
      for (;;) {
        if (level == 0) goto done;
        --level;
        if (++idx[level] < prob[level].size()) break;
        idx[level] = 0;
      }
    }
    amp[level + 1] = amp[level] * elem[level][idx[level]];
    pr[level + 1] = pr[level] * prob[level][idx[level]];
    ++level;
  }
done:

  numerics::KahanSum mass;
  for (const RabiPoint& p : dist.points) mass.add(p.probability);
  dist.truncation_deficit = 1.0 - mass.value();
  return dist;
}

DiscreteRabiDistribution compact_distribution(
    const DiscreteRabiDistribution& dist, std::size_t n_bins) {
  if (n_bins < 2) throw domain_error("compact: need at least 2 bins");
  if (dist.points.empty()) throw domain_error("compact: empty distribution");
  if (dist.points.size() <= n_bins) return dist;

  auto [lo_it, hi_it] = std::minmax_element(
      dist.points.begin(), dist.points.end(),
      [](const RabiPoint& a, const RabiPoint& b) { return a.omega < b.omega; });
  double lo = lo_it->omega, hi = hi_it->omega;
  DiscreteRabiDistribution out;
  out.omega0 = dist.omega0;
  out.truncation_deficit = dist.truncation_deficit;
  if (hi == lo) {
    double mass = 0.0;
    for (const RabiPoint& p : dist.points) mass += p.probability;
    out.points.push_back(RabiPoint{lo, mass});
    return out;
  }

  std::vector<double> mass(n_bins, 0.0), moment(n_bins, 0.0);
  double inv_w = n_bins / (hi - lo);
  for (const RabiPoint& p : dist.points) {
    auto k = static_cast<std::size_t>((p.omega - lo) * inv_w);
    if (k >= n_bins) k = n_bins - 1;
    mass[k] += p.probability;
    moment[k] += p.probability * p.omega;
  }
  for (std::size_t k = 0; k < n_bins; ++k)
    if (mass[k] > 0.0) out.points.push_back(RabiPoint{moment[k] / mass[k], mass[k]});
  return out;
}

SmoothedDistribution smooth_distribution(const DiscreteRabiDistribution& dist,
                                         double sigma,
                                         std::size_t grid_points) {
  if (dist.points.empty()) throw domain_error("smooth: empty distribution");
  if (!(sigma > 0.0)) throw domain_error("smooth: sigma must be > 0");
  if (grid_points < 100)
    throw domain_error("smooth: need at least 100 grid points");

  double omega_min = dist.points.front().omega;
  for (const RabiPoint& p : dist.points)
    omega_min = std::min(omega_min, p.omega);
  double lo = std::max(0.0, omega_min - 5.0 * sigma);
  double hi = dist.omega0;
  if (!(hi > lo)) throw domain_error("smooth: degenerate grid span");

  // Pre-bin the point masses; per-bin centroids keep the placement error
  // of each mass below bin_width/2 << sigma.
  double span = hi - lo;
  auto n_bins = static_cast<std::size_t>(std::ceil(span / (sigma / 64.0)));
  n_bins = std::clamp<std::size_t>(n_bins, 64, 1u << 22);
  std::vector<double> mass(n_bins, 0.0), moment(n_bins, 0.0);
  double inv_w = n_bins / span;
  for (const RabiPoint& p : dist.points) {
    auto k = static_cast<std::size_t>((p.omega - lo) * inv_w);
    if (k >= n_bins) k = n_bins - 1;
    mass[k] += p.probability;
    moment[k] += p.probability * p.omega;
  }

  SmoothedDistribution sm;
  sm.sigma = sigma;
  sm.omega0 = dist.omega0;
  sm.truncation_deficit = dist.truncation_deficit;
  sm.grid.resize(grid_points);
  sm.density.assign(grid_points, 0.0);
  double step = span / static_cast<double>(grid_points - 1);
  double norm = 1.0 / (std::sqrt(two_pi) * sigma);
  double inv_2s2 = 1.0 / (2.0 * sigma * sigma);
  double window = 8.0 * sigma;
  for (std::size_t g = 0; g < grid_points; ++g) {
    double xg = lo + step * static_cast<double>(g);
    sm.grid[g] = xg;
    auto k0 = static_cast<std::size_t>(
        std::max(0.0, std::floor((xg - window - lo) * inv_w)));
    auto k1 = static_cast<std::size_t>(
        std::max(0.0, std::ceil((xg + window - lo) * inv_w)));
    k1 = std::min(k1, n_bins - 1);
    double acc = 0.0;
    for (std::size_t k = k0; k <= k1; ++k) {
      if (mass[k] == 0.0) continue;
      double d = xg - moment[k] / mass[k];
      acc += mass[k] * std::exp(-d * d * inv_2s2);
    }
    sm.density[g] = acc * norm;
  }
  return sm;
}

double normalize_pdf(double omega0, double b) {
  if (!(omega0 > 0.0)) throw domain_error("normalize_pdf: omega0 must be > 0");
  if (!(b > 0.0)) throw domain_error("normalize_pdf: b must be > 0");
  double error = 0.0;
  double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [b](double v) { return model_integrand(v, b); }, 0.0, kVMax, 12, 1e-10,
      &error);
  if (!std::isfinite(integral) || integral <= 0.0 ||
      error > 1e-8 * integral)
    throw numeric_error("normalize_pdf: quadrature failed, b=" +
                        std::to_string(b));
  double n = 1.0 / (4.0 * omega0 * std::pow(b, 10) * integral);
  if (!std::isfinite(n))
    throw numeric_error("normalize_pdf: normalization overflow, b=" +
                        std::to_string(b));
  return n;
}

EffectiveRabiDistribution make_effective_distribution(double omega0, double b) {
  if (!(omega0 > 0.0)) throw domain_error("effective: omega0 must be > 0");
  if (!(b >= 0.0)) throw domain_error("effective: b must be >= 0");
  EffectiveRabiDistribution d;
  d.omega0 = omega0;
  d.b = b;
  d.normalization = (b > 0.0) ? normalize_pdf(omega0, b) : 0.0;
  return d;
}

namespace {

// log of the unnormalized model density at scaled detuning s > 0.
inline double log_shape(double s, double b) {
  return 4.0 * std::log(s) - std::sqrt(std::sqrt(s)) / std::sqrt(b);
}

inline double pdf_at(double omega, double omega0, double b, double log_norm) {
  if (!(omega > 0.0) || omega >= omega0) return 0.0;
  double s = (omega0 - omega) / omega;
  double a = log_norm + log_shape(s, b);
  return a < -745.0 ? 0.0 : std::exp(a);
}

}  // namespace

double effective_pdf(double omega, const EffectiveRabiDistribution& dist) {
  if (!(omega > 0.0) || omega > dist.omega0)
    throw domain_error("effective_pdf: omega must be in (0, omega0]");
  if (dist.b == 0.0) return 0.0;  // singular case: density 0 a.e.
  return pdf_at(omega, dist.omega0, dist.b, std::log(dist.normalization));
}

BFitResult fit_b(const SmoothedDistribution& smoothed, double omega0) {
  if (!(omega0 > 0.0)) throw domain_error("fit_b: omega0 must be > 0");
  if (smoothed.grid.size() < 100)
    throw domain_error("fit_b: need at least 100 grid points");

  const double lo = std::log(1e-6), hi = std::log(1e-1);
  auto sse = [&](double log_b) {
    double b = std::exp(log_b);
    double log_norm = std::log(normalize_pdf(omega0, b));
    double acc = 0.0;
    for (std::size_t i = 0; i < smoothed.grid.size(); ++i) {
      double d = pdf_at(smoothed.grid[i], omega0, b, log_norm) -
                 smoothed.density[i];
      acc += d * d;
    }
    return acc;
  };
  numerics::BrentResult r = numerics::brent_minimize(sse, lo, hi, 1e-6 / 14.0);
  if (r.at_lower || r.at_upper)
    throw fit_error("fit_b: minimizer at bracket boundary, log b = " +
                    std::to_string(r.x));

  double d2 = 0.0;
  for (double d : smoothed.density) d2 += d * d;
  if (d2 <= 0.0) throw fit_error("fit_b: smoothed density is all zero");
  return BFitResult{std::exp(r.x), std::sqrt(r.f / d2)};
}

TemperatureCalibration calibrate_c(
    const LaserGeometry& geometry,
    const std::vector<double>& mode_angular_frequencies,
    double doppler_temperature, const std::vector<double>& temperature_grid,
    const DistributionNumerics& numerics) {
  if (!(doppler_temperature > 0.0))
    throw domain_error("calibrate_c: doppler temperature must be > 0");
  if (temperature_grid.size() < 5)
    throw domain_error("calibrate_c: need at least 5 temperatures");
  double t_lo = *std::min_element(temperature_grid.begin(),
                                  temperature_grid.end());
  double t_hi = *std::max_element(temperature_grid.begin(),
                                  temperature_grid.end());
  if (t_lo > 0.5 * doppler_temperature * (1.0 + 1e-9) ||
      t_hi < 5.0 * doppler_temperature * (1.0 - 1e-9))
    throw domain_error(
        "calibrate_c: grid must span at least [0.5, 5] x T_D");

  const double omega_ref = angular_from_hz(1e5);
  TemperatureCalibration cal;
  cal.doppler_temperature = doppler_temperature;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < temperature_grid.size(); ++i) {
    double t = temperature_grid[i];
    try {
      ModeSet set = make_mode_set(geometry, mode_angular_frequencies, t);
      DiscreteRabiDistribution dist = enumerate_distribution(
          set, omega_ref, numerics.eps_trunc, numerics.max_tuples);
      SmoothedDistribution sm = smooth_distribution(
          dist, numerics.sigma_over_omega0 * omega_ref, numerics.grid_points);
      BFitResult fit = fit_b(sm, omega_ref);
      cal.points.push_back(
          CalibrationPoint{t / doppler_temperature, fit.b});
    } catch (const std::exception& e) {
      throw fit_error("calibrate_c: point " + std::to_string(i) + " (T = " +
                      std::to_string(t) + " K) failed: " + e.what());
    }
    double x = cal.points.back().b * cal.points.back().b;
    double y = cal.points.back().t_over_td;
    sxx += x * x;
    sxy += x * y;
  }
  if (!(sxx > 0.0)) throw fit_error("calibrate_c: degenerate regression");
  cal.c = sxy / sxx;

  double ss_res = 0.0, ss_tot = 0.0, ss_raw = 0.0, y_bar = 0.0;
  for (const CalibrationPoint& p : cal.points) y_bar += p.t_over_td;
  y_bar /= static_cast<double>(cal.points.size());
  for (const CalibrationPoint& p : cal.points) {
    double r = p.t_over_td - cal.c * p.b * p.b;
    ss_res += r * r;
    ss_tot += (p.t_over_td - y_bar) * (p.t_over_td - y_bar);
    ss_raw += p.t_over_td * p.t_over_td;
  }
  cal.fit_residual = std::sqrt(ss_res / static_cast<double>(cal.points.size()));
  cal.r_squared = (ss_raw > 0.0) ? 1.0 - ss_res / ss_raw : 0.0;
  cal.r_squared_centered = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 0.0;
  return cal;
}

double omega0_from_tau_max(double tau_max, double b) {
  if (!(tau_max > 0.0)) throw domain_error("omega0_from_tau_max: tau_max <= 0");
  if (!(b >= 0.0)) throw domain_error("omega0_from_tau_max: b < 0");
  return pi / tau_max * (1.0 + 65536.0 * b * b);
}

double effective_pdf_argmax(double omega0, double b) {
  if (!(omega0 > 0.0)) throw domain_error("pdf argmax: omega0 must be > 0");
  if (!(b >= 0.0)) throw domain_error("pdf argmax: b < 0");
  return omega0 / (1.0 + 65536.0 * b * b);
}

}  // namespace thermalrabi
