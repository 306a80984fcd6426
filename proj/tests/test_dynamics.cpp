#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/dynamics.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/mode_spectrum.hpp"
#include "thermalrabi/rabi_distribution.hpp"

using namespace thermalrabi;

namespace {

PulseProgram constant_pulse(double amp, double detuning, double duration,
                            std::size_t n = 1) {
  PulseProgram p;
  for (std::size_t i = 0; i < n; ++i)
    p.samples.push_back(PulseSample{duration / n, amp, detuning});
  return p;
}

// Linear detuning sweep at constant amplitude with short amplitude ramps
// at the ends; wide span and small per-segment phase keep the discrete
// propagation within ~1e-7 of the ideal sweep.
PulseProgram landau_zener_pulse(double w, double alpha) {
  const double span = 300.0 * w;             // detuning reach, both signs
  const double duration = 2.0 * span / alpha;
  const double rate = std::sqrt(span * span + w * w);
  const std::size_t n =
      static_cast<std::size_t>(std::ceil(duration * rate / 0.3));
  const std::size_t ramp = 64;
  PulseProgram p;
  const double dt = duration / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = -0.5 * duration + (i + 0.5) * dt;
    double scale = 1.0;
    if (i < ramp) scale = (i + 0.5) / ramp;
    if (n - 1 - i < ramp) scale = (n - 0.5 - i) / ramp;
    p.samples.push_back(PulseSample{dt, w * scale, alpha * t});
  }
  return p;
}

}  // namespace

TEST_CASE("exact square-pulse average is the two-point cosine sum") {
  DiscreteRabiDistribution dist;
  dist.omega0 = two_pi * 100e3;
  dist.points = {RabiPoint{two_pi * 95e3, 0.6}, RabiPoint{two_pi * 99e3, 0.4}};
  for (double t : {0.0, 2e-6, 7.3e-6}) {
    const double expected =
        0.6 * 0.5 * (1.0 - std::cos(two_pi * 95e3 * t)) +
        0.4 * 0.5 * (1.0 - std::cos(two_pi * 99e3 * t));
    CHECK(square_pulse_exact(dist, t) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(square_pulse_exact(dist, -1e-6), domain_error);
}

TEST_CASE("effective trace reduces to bare Rabi flopping at b = 0") {
  auto dist = make_effective_distribution(two_pi * 104.9e3, 0.0);
  for (double t : {0.0, 1e-6, 4.765e-6, 2e-5}) {
    const double s = std::sin(0.5 * dist.omega0 * t);
    CHECK(square_pulse_effective(dist, t) ==
          doctest::Approx(s * s).epsilon(1e-12));
  }
}

TEST_CASE("batched effective trace matches the scalar overload") {
  auto dist = make_effective_distribution(two_pi * 104.9e3, 7.1e-4);
  std::vector<double> times;
  for (int i = 0; i < 40; ++i) times.push_back(i * 1.3e-6);
  auto batch = square_pulse_effective(dist, times);
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(batch[i] == doctest::Approx(square_pulse_effective(
                          dist, times[i])).epsilon(1e-14));
}

TEST_CASE("effective trace is converged in the node count") {
  auto dist = make_effective_distribution(two_pi * 104.9e3, 1.5e-3);
  for (double t : {5e-6, 2e-5, 5e-5}) {
    const double coarse = square_pulse_effective(dist, t, 512);
    const double fine = square_pulse_effective(dist, t, 2048);
    CHECK(std::fabs(coarse - fine) < 1e-10);
  }
}

TEST_CASE("exact and model dephasing traces agree at the reference state") {
  ModeSet modes =
      make_mode_set(reference_geometry(), reference_mode_frequencies(),
                    2.0 * reference_doppler_temperature);
  const double omega0 = two_pi * 104.9e3;
  auto exact = compact_distribution(
      enumerate_distribution(modes, omega0), 100000);
  auto smoothed = smooth_distribution(exact, 1e-3 * omega0);
  auto model = make_effective_distribution(omega0, fit_b(smoothed, omega0).b);
  std::vector<double> times;
  for (int i = 0; i <= 200; ++i) times.push_back(50e-6 * i / 200.0);
  auto p_model = square_pulse_effective(model, times);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i)
    worst = std::max(worst,
                     std::fabs(square_pulse_exact(exact, times[i]) - p_model[i]));
  CHECK(worst < 0.01);
}

TEST_CASE("trace maximum lags the density-peak relation") {
  // The first maximum of the averaged trace sits later than
  // (pi/omega0)(1 + 2^16 b^2): the average runs over the full density, not
  // just its peak.
  const double omega0 = two_pi * 105.0e3;
  for (double b : {4e-4, 7.1e-4, 1.1e-3}) {
    auto dist = make_effective_distribution(omega0, b);
    std::vector<double> times;
    const double t0 = 0.9 * pi / omega0, t1 = 1.6 * pi / omega0;
    const int n = 4000;
    for (int i = 0; i <= n; ++i)
      times.push_back(t0 + (t1 - t0) * i / double(n));
    auto p = square_pulse_effective(dist, times);
    std::size_t k = 0;
    for (std::size_t i = 1; i + 1 < p.size(); ++i)
      if (p[i] > p[i - 1] && p[i] >= p[i + 1]) {
        k = i;
        break;
      }
    REQUIRE(k > 0);
    const double excess = times[k] * omega0 / pi - 1.0;
    const double lag = excess / (65536.0 * b * b);
    CHECK(lag > 1.5);
    CHECK(lag < 4.0);
    if (b == 7.1e-4)
      CHECK(times[k] == doctest::Approx(5.147e-6).epsilon(0.01));
  }
}

TEST_CASE("single-segment propagation follows the Rabi formula") {
  const double w = two_pi * 150e3;
  SUBCASE("resonant pi pulse inverts") {
    auto p = constant_pulse(w, 0.0, pi / w);
    QubitAmplitudes a = propagate(p, 1.0, 1.0, 0.0);
    CHECK(std::norm(a.c_e) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("detuned flopping") {
    const double delta = two_pi * 80e3;
    const double weff = std::sqrt(w * w + delta * delta);
    for (double t : {1e-6, 3.7e-6, 9e-6}) {
      auto p = constant_pulse(w, delta, t);
      QubitAmplitudes a = propagate(p, 1.0, 1.0, 0.0);
      const double expected =
          (w * w / (weff * weff)) * std::pow(std::sin(0.5 * weff * t), 2);
      CHECK(std::norm(a.c_e) == doctest::Approx(expected).epsilon(1e-11));
    }
  }
  SUBCASE("segment composition is exact") {
    auto one = constant_pulse(w, two_pi * 30e3, 6e-6, 1);
    auto many = constant_pulse(w, two_pi * 30e3, 6e-6, 7);
    QubitAmplitudes a = propagate(one, 1.0, 1.0, 0.0);
    QubitAmplitudes b = propagate(many, 1.0, 1.0, 0.0);
    CHECK(std::abs(a.c_e - b.c_e) < 1e-12);
    CHECK(std::abs(a.c_g - b.c_g) < 1e-12);
  }
}

TEST_CASE("propagation is unitary to 1e-12 across the pulse zoo") {
  auto rap = build_rap_pulse(two_pi * 221e3, 50e-6, 100e3);
  for (double x : {0.1, 0.5, 1.0})
    for (double y : {0.5, 1.0, 1.5})
      for (double d : {-two_pi * 150e3, 0.0, two_pi * 80e3}) {
        QubitAmplitudes a = propagate(rap, x, y, d);
        CHECK(std::fabs(std::norm(a.c_g) + std::norm(a.c_e) - 1.0) < 1e-12);
      }
}

TEST_CASE("RAP pulse discretization") {
  const double w0 = two_pi * 105e3, tau = 50e-6, rc = 100e3;
  const std::size_t n = 50;
  auto p = build_rap_pulse(w0, tau, rc, n);
  REQUIRE(p.samples.size() == n);
  double total = 0.0;
  for (const auto& s : p.samples) total += s.duration;
  CHECK(total == doctest::Approx(4.0 * tau).epsilon(1e-12));
  const double dt = 4.0 * tau / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = -2.0 * tau + (i + 0.5) * dt;
    CHECK(p.samples[i].rabi_amplitude ==
          doctest::Approx(w0 * std::exp(-t * t / (2.0 * tau * tau)))
              .epsilon(1e-12));
    CHECK(p.samples[i].detuning ==
          doctest::Approx(pi * rc * t / tau).epsilon(1e-12));
    CHECK(p.samples[i].rabi_amplitude ==
          doctest::Approx(p.samples[n - 1 - i].rabi_amplitude).epsilon(1e-12));
  }
  CHECK(p.metadata.omega0_cal == w0);
  CHECK(p.metadata.tau_sigma == tau);
  CHECK(p.metadata.chirp_range_hz == rc);
  CHECK(p.metadata.n_samples == n);
  CHECK_THROWS_AS(build_rap_pulse(w0, -1e-6, rc), domain_error);
  CHECK_THROWS_AS(build_rap_pulse(w0, tau, rc, 1), domain_error);
}

TEST_CASE("linear sweep matches the Landau-Zener survival law") {
  const double w = two_pi * 1e5;
  for (double gamma : {0.5, 2.0, 5.0}) {
    const double alpha = pi * w * w / (2.0 * gamma);
    auto pulse = landau_zener_pulse(w, alpha);
    QubitAmplitudes a = propagate(pulse, 1.0, 1.0, 0.0);
    CHECK(std::fabs(std::norm(a.c_g) - std::exp(-gamma)) < 1e-3);
  }
}

TEST_CASE("thermal averaging over the amplitude factor") {
  auto pulse = build_rap_pulse(two_pi * 221e3, 50e-6, 100e3);
  SUBCASE("b = 0 collapses onto the bare pulse") {
    auto eff = make_effective_distribution(two_pi * 104.9e3, 0.0);
    TransferResult avg = thermal_average_transfer(pulse, eff, 1.0, 0.0);
    QubitAmplitudes a = propagate(pulse, 1.0, 1.0, 0.0);
    CHECK(avg.p_excited == doctest::Approx(std::norm(a.c_e)).epsilon(1e-14));
  }
  SUBCASE("explicit weights reproduce the model average") {
    auto eff = make_effective_distribution(two_pi * 104.9e3, 7.1e-4);
    const double dx = 0.01;
    std::vector<double> xs, ws;
    for (std::size_t j = 0;; ++j) {
      const double x = (j + 0.5) * dx;
      if (x > 1.0) break;
      xs.push_back(x);
      ws.push_back(effective_pdf(x * eff.omega0, eff));
    }
    TransferResult lhs = thermal_average_transfer(pulse, eff, 1.0, 0.0, dx);
    TransferResult rhs = weighted_average_transfer(pulse, xs, ws, 1.0, 0.0);
    CHECK(lhs.p_excited == doctest::Approx(rhs.p_excited).epsilon(1e-14));
  }
  SUBCASE("grid refinement is settled for the chirped pulse") {
    auto eff = make_effective_distribution(two_pi * 104.9e3, 7.1e-4);
    const double coarse =
        thermal_average_transfer(pulse, eff, 1.0, 0.0, 0.01).p_excited;
    const double fine =
        thermal_average_transfer(pulse, eff, 1.0, 0.0, 0.005).p_excited;
    CHECK(std::fabs(coarse - fine) < 1e-3);
  }
  SUBCASE("infidelity bookkeeping") {
    auto eff = make_effective_distribution(two_pi * 104.9e3, 7.1e-4);
    TransferResult r = thermal_average_transfer(pulse, eff, 1.0, 0.0);
    CHECK(r.infidelity == doctest::Approx(1.0 - r.p_excited).epsilon(1e-14));
    CHECK(r.log10_infidelity ==
          doctest::Approx(std::log10(std::max(r.infidelity, 1e-12)))
              .epsilon(1e-12));
  }
}
