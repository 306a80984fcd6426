#include <doctest.h>

#include <boost/math/special_functions/laguerre.hpp>
#include <cmath>
#include <vector>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/mode_spectrum.hpp"
#include "thermalrabi/rabi_distribution.hpp"

using namespace thermalrabi;

namespace {

// Shared reference pipeline at twice the Doppler temperature; enumerating
// it once keeps the suite quick.
const DiscreteRabiDistribution& reference_exact() {
  static const DiscreteRabiDistribution dist = [] {
    ModeSet modes =
        make_mode_set(reference_geometry(), reference_mode_frequencies(),
                      2.0 * reference_doppler_temperature);
    return enumerate_distribution(modes, two_pi * 104.9e3);
  }();
  return dist;
}

const SmoothedDistribution& reference_smoothed() {
  static const SmoothedDistribution sm =
      smooth_distribution(reference_exact(), 1e-3 * two_pi * 104.9e3);
  return sm;
}

}  // namespace

TEST_CASE("carrier matrix element against the Laguerre polynomial") {
  const double eta = 0.059;
  const double x = eta * eta;
  for (long n : {0L, 1L, 2L, 5L, 20L, 100L}) {
    const double expected =
        std::exp(-0.5 * x) *
        boost::math::laguerre(static_cast<unsigned>(n), x);
    CHECK(carrier_matrix_element(n, eta) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::fabs(carrier_matrix_element(300, 0.3)) < 1.0);
}

TEST_CASE("single-mode enumeration is the thermal Fock ladder") {
  LaserGeometry g = make_laser_geometry(729e-9, 40.0 * atomic_mass_unit,
                                        {45.0 * pi / 180.0});
  const double w = two_pi * 1.35e6;
  ModeSet modes = make_mode_set(g, {w}, 1e-3);
  const double omega0 = two_pi * 100.0e3;
  auto dist = enumerate_distribution(modes, omega0, 1e-6);
  const double eta = modes.modes[0].lamb_dicke;
  const double n_bar = modes.modes[0].mean_occupation;
  double total = 0.0;
  for (const auto& pt : dist.points) total += pt.probability;
  CHECK(total == doctest::Approx(1.0 - dist.truncation_deficit).epsilon(1e-12));
  CHECK(dist.truncation_deficit < 1e-6);
  // Each Fock level appears at omega0 |M_n| with weight p_th(n).
  double check_mass = 0.0;
  for (long n = 0; n < 40; ++n) {
    const double target = omega0 * std::fabs(carrier_matrix_element(n, eta));
    bool found = false;
    for (const auto& pt : dist.points)
      if (std::fabs(pt.omega - target) < 1e-9 * omega0 &&
          std::fabs(pt.probability - thermal_probability(n, n_bar)) < 1e-12) {
        found = true;
        check_mass += pt.probability;
        break;
      }
    CHECK(found);
  }
  CHECK(check_mass > 0.9);
}

TEST_CASE("reference enumeration: support and mass") {
  const auto& dist = reference_exact();
  CHECK(dist.truncation_deficit <= 1e-4);
  double total = 0.0;
  std::size_t bad_support = 0, bad_mass = 0;
  for (const auto& pt : dist.points) {
    if (!(pt.omega > 0.0 && pt.omega <= dist.omega0)) ++bad_support;
    if (!(pt.probability > 0.0)) ++bad_mass;
    total += pt.probability;
  }
  CHECK(bad_support == 0);
  CHECK(bad_mass == 0);
  CHECK(total == doctest::Approx(1.0 - dist.truncation_deficit).epsilon(1e-9));
}

TEST_CASE("compaction preserves mass and mean") {
  const auto& dist = reference_exact();
  auto small = compact_distribution(dist, 512);
  CHECK(small.points.size() <= 512);
  double m0 = 0.0, m1 = 0.0, s0 = 0.0, s1 = 0.0;
  for (const auto& pt : dist.points) {
    m0 += pt.probability;
    m1 += pt.probability * pt.omega;
  }
  for (const auto& pt : small.points) {
    s0 += pt.probability;
    s1 += pt.probability * pt.omega;
  }
  CHECK(s0 == doctest::Approx(m0).epsilon(1e-12));
  CHECK(s1 == doctest::Approx(m1).epsilon(1e-9));
}

TEST_CASE("smoothed density carries the distribution mass") {
  const auto& sm = reference_smoothed();
  double integral = 0.0;
  for (std::size_t i = 1; i < sm.grid.size(); ++i)
    integral += 0.5 * (sm.density[i] + sm.density[i - 1]) *
                (sm.grid[i] - sm.grid[i - 1]);
  CHECK(integral ==
        doctest::Approx(1.0 - reference_exact().truncation_deficit)
            .epsilon(1e-3));
}

TEST_CASE("model density normalizes to one") {
  // Independent route: substitute s = ((omega0-omega)/(b^2 omega))^(1/4)
  // and integrate the s-space density by Simpson's rule.
  for (double b : {1e-4, 7.1e-4, 3e-3}) {
    const double omega0 = two_pi * 104.9e3;
    auto dist = make_effective_distribution(omega0, b);
    const double b2 = b * b;
    auto integrand = [&](double s) {
      const double s4 = s * s * s * s;
      const double denom = 1.0 + b2 * s4;
      const double omega = omega0 / denom;
      return effective_pdf(omega, dist) * omega0 * 4.0 * b2 * s * s * s /
             (denom * denom);
    };
    const int n = 30000;
    const double h = 150.0 / n;
    double sum = integrand(0.0) + integrand(150.0);
    for (int i = 1; i < n; ++i)
      sum += integrand(i * h) * (i % 2 ? 4.0 : 2.0);
    CHECK(sum * h / 3.0 == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("model density rejects off-support arguments and scales with "
          "omega0") {
  auto dist = make_effective_distribution(two_pi * 100e3, 7.1e-4);
  CHECK_THROWS_AS(effective_pdf(-1.0, dist), domain_error);
  CHECK_THROWS_AS(effective_pdf(0.0, dist), domain_error);
  CHECK_THROWS_AS(effective_pdf(dist.omega0 * 1.0001, dist), domain_error);
  CHECK(effective_pdf(dist.omega0, dist) == 0.0);
  auto scaled = make_effective_distribution(two_pi * 250e3, 7.1e-4);
  for (double x : {0.95, 0.985, 0.999}) {
    const double lhs = effective_pdf(x * dist.omega0, dist) * dist.omega0;
    const double rhs = effective_pdf(x * scaled.omega0, scaled) * scaled.omega0;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("density maximum sits at the closed-form location") {
  for (double b : {2e-4, 7.1e-4, 2e-3}) {
    const double omega0 = two_pi * 104.9e3;
    auto dist = make_effective_distribution(omega0, b);
    const double claimed = effective_pdf_argmax(omega0, b);
    CHECK(claimed ==
          doctest::Approx(omega0 / (1.0 + 65536.0 * b * b)).epsilon(1e-12));
    // Numeric confirmation on a fine local grid.
    double best_w = 0.0, best_p = -1.0;
    for (int i = -2000; i <= 2000; ++i) {
      const double w = claimed * (1.0 + 2e-9 * i);
      const double p = effective_pdf(w, dist);
      if (p > best_p) {
        best_p = p;
        best_w = w;
      }
    }
    CHECK(std::fabs(best_w - claimed) / claimed < 1e-6);
  }
}

TEST_CASE("peak-time relation inverts exactly") {
  const double omega0 = two_pi * 104.9e3, b = 7.1e-4;
  const double tau = (pi / omega0) * (1.0 + 65536.0 * b * b);
  CHECK(omega0_from_tau_max(tau, b) == doctest::Approx(omega0).epsilon(1e-12));
}

TEST_CASE("shape fit recovers b from its own density") {
  const double omega0 = two_pi * 104.9e3, b_true = 5e-4;
  auto model = make_effective_distribution(omega0, b_true);
  SmoothedDistribution synthetic;
  synthetic.omega0 = omega0;
  const std::size_t n = 2001;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = omega0 * (0.90 + 0.10 * double(i) / double(n - 1));
    synthetic.grid.push_back(w);
    synthetic.density.push_back(effective_pdf(w, model));
  }
  BFitResult fit = fit_b(synthetic, omega0);
  CHECK(fit.b == doctest::Approx(b_true).epsilon(1e-5));
  CHECK(fit.residual < 1e-6);
}

TEST_CASE("reference thermal state fits the printed shape parameter") {
  BFitResult fit = fit_b(reference_smoothed(), two_pi * 104.9e3);
  CHECK(std::fabs(fit.b - 7.1e-4) / 7.1e-4 < 0.05);
  CHECK(fit.b == doctest::Approx(6.8016e-4).epsilon(2e-3));
}

TEST_CASE("shape fit reports misfit or fails at the bracket") {
  // A flat density is not in the family; the fit still converges somewhere
  // interior but the residual exposes the misfit.
  SmoothedDistribution flat;
  flat.omega0 = two_pi * 100e3;
  for (int i = 0; i < 401; ++i) {
    flat.grid.push_back(flat.omega0 * (0.5 + 0.5 * i / 400.0));
    flat.density.push_back(1.0 / flat.omega0);
  }
  BFitResult fit = fit_b(flat, flat.omega0);
  CHECK(fit.residual > 0.4);

  // A near-empty window just below omega0 drives b to the top of the
  // bracket (mass keeps draining out of the window) and that is an error.
  SmoothedDistribution empty;
  empty.omega0 = two_pi * 100e3;
  for (int i = 0; i <= 400; ++i) {
    empty.grid.push_back(empty.omega0 * (0.9 + 0.1 * i / 400.0));
    empty.density.push_back(1e-12 / empty.omega0);
  }
  CHECK_THROWS_AS(fit_b(empty, empty.omega0), fit_error);
}

TEST_CASE("calibration regression on a five-point grid") {
  const double td = reference_doppler_temperature;
  TemperatureCalibration cal = calibrate_c(
      reference_geometry(), reference_mode_frequencies(), td,
      {0.5 * td, 1.0 * td, 2.0 * td, 3.0 * td, 5.0 * td});
  CHECK(cal.points.size() == 5);
  CHECK(std::fabs(cal.c - 4.0e6) / 4.0e6 < 0.15);
  CHECK(cal.r_squared > 0.9);
  CHECK(cal.r_squared <= 1.0);
  for (const auto& pt : cal.points) CHECK(pt.b > 0.0);
}

TEST_CASE("enumeration budget and argument validation") {
  ModeSet modes =
      make_mode_set(reference_geometry(), reference_mode_frequencies(),
                    2.0 * reference_doppler_temperature);
  CHECK_THROWS_AS(enumerate_distribution(modes, two_pi * 104.9e3, 1e-4, 10),
                  resource_error);
  CHECK_THROWS_AS(enumerate_distribution(modes, -1.0), domain_error);
  CHECK_THROWS_AS(enumerate_distribution(modes, two_pi * 104.9e3, 2.0),
                  domain_error);
}
