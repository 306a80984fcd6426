#include "thermalrabi/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/numerics.hpp"

namespace thermalrabi {

QubitAmplitudes make_qubit_amplitudes(std::complex<double> c_g,
                                      std::complex<double> c_e) {
  double n = std::norm(c_g) + std::norm(c_e);
  if (std::abs(n - 1.0) > 1e-12)
    throw domain_error("qubit amplitudes: norm deviates from 1 by > 1e-12");
  return QubitAmplitudes{c_g, c_e};
}

namespace {

TransferResult make_transfer_result(double p) {
  TransferResult r;
  r.p_excited = p;
  r.infidelity = 1.0 - p;
  r.log10_infidelity = std::log10(std::max(r.infidelity, 1e-12));
  return r;
}

}  // namespace

double square_pulse_exact(const DiscreteRabiDistribution& dist, double t) {
  if (!(t >= 0.0)) throw domain_error("square_pulse_exact: t must be >= 0");
  if (dist.points.empty())
    throw domain_error("square_pulse_exact: empty distribution");
  numerics::KahanSum acc;
  for (const RabiPoint& p : dist.points)
    acc.add(p.probability * (1.0 - std::cos(p.omega * t)));
  return 0.5 * acc.value();
}

double square_pulse_effective(const EffectiveRabiDistribution& dist, double t,
                              int quad_nodes) {
  if (!(t >= 0.0))
    throw domain_error("square_pulse_effective: t must be >= 0");
  if (quad_nodes < 16)
    throw domain_error("square_pulse_effective: too few quadrature nodes");
  if (dist.b == 0.0) {
    double s = std::sin(0.5 * dist.omega0 * t);
    return s * s;
  }

  // v-substituted form; the model normalization cancels in the ratio.
  const numerics::Quadrature& q = numerics::gauss_legendre(quad_nodes);
  const double b2 = dist.b * dist.b;
  const double half = 60.0;  // maps [-1,1] to [0, 120]
  double wsum = 0.0, psum = 0.0;
  for (int i = 0; i < quad_nodes; ++i) {
    double v = half * (q.nodes[i] + 1.0);
    if (v <= 0.0) continue;
    double v4 = v * v * v * v;
    double d = 1.0 + b2 * v4;
    double w = q.weights[i] * std::exp(19.0 * std::log(v) - v) / (d * d);
    wsum += w;
    psum += w * (1.0 - std::cos(dist.omega0 / d * t));
  }
  if (!(wsum > 0.0) || !std::isfinite(psum))
    throw numeric_error("square_pulse_effective: degenerate quadrature");
  return 0.5 * psum / wsum;
}

std::vector<double> square_pulse_effective(const EffectiveRabiDistribution& dist,
                                           const std::vector<double>& times,
                                           int quad_nodes) {
  if (quad_nodes < 16)
    throw domain_error("square_pulse_effective: too few quadrature nodes");
  std::vector<double> out(times.size());
  if (dist.b == 0.0) {
    for (std::size_t k = 0; k < times.size(); ++k) {
      if (!(times[k] >= 0.0))
        throw domain_error("square_pulse_effective: t must be >= 0");
      double s = std::sin(0.5 * dist.omega0 * times[k]);
      out[k] = s * s;
    }
    return out;
  }

  const numerics::Quadrature& q = numerics::gauss_legendre(quad_nodes);
  const double b2 = dist.b * dist.b;
  const double half = 60.0;
  std::vector<double> node_w, node_om;
  node_w.reserve(quad_nodes);
  node_om.reserve(quad_nodes);
  double wsum = 0.0;
  for (int i = 0; i < quad_nodes; ++i) {
    double v = half * (q.nodes[i] + 1.0);
    if (v <= 0.0) continue;
    double v4 = v * v * v * v;
    double d = 1.0 + b2 * v4;
    double w = q.weights[i] * std::exp(19.0 * std::log(v) - v) / (d * d);
    wsum += w;
    node_w.push_back(w);
    node_om.push_back(dist.omega0 / d);
  }
  if (!(wsum > 0.0))
    throw numeric_error("square_pulse_effective: degenerate quadrature");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0))
      throw domain_error("square_pulse_effective: t must be >= 0");
    double psum = 0.0;
    for (std::size_t i = 0; i < node_w.size(); ++i)
      psum += node_w[i] * (1.0 - std::cos(node_om[i] * times[k]));
    if (!std::isfinite(psum))
      throw numeric_error("square_pulse_effective: degenerate quadrature");
    out[k] = 0.5 * psum / wsum;
  }
  return out;
}

PulseProgram build_rap_pulse(double omega0_cal, double tau_sigma,
                             double chirp_range_hz, std::size_t n_samples) {
  if (!(omega0_cal >= 0.0))
    throw domain_error("rap pulse: omega0_cal must be >= 0");
  if (!(tau_sigma > 0.0)) throw domain_error("rap pulse: tau_sigma must be > 0");
  if (n_samples < 2) throw domain_error("rap pulse: need at least 2 samples");
  if (!std::isfinite(chirp_range_hz))
    throw domain_error("rap pulse: chirp range must be finite");

  PulseProgram p;
  p.metadata = PulseMetadata{omega0_cal, tau_sigma, chirp_range_hz, n_samples};
  p.samples.reserve(n_samples);
  double dt = 4.0 * tau_sigma / static_cast<double>(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    double tc = -2.0 * tau_sigma + (static_cast<double>(j) + 0.5) * dt;
    PulseSample s;
    s.duration = dt;
    s.rabi_amplitude =
        omega0_cal * std::exp(-tc * tc / (2.0 * tau_sigma * tau_sigma));
    s.detuning = pi * chirp_range_hz * tc / tau_sigma;
    p.samples.push_back(s);
  }
  return p;
}

QubitAmplitudes propagate(const PulseProgram& pulse, double x, double y,
                          double delta_prime, const QubitAmplitudes& initial) {
  if (!(x >= 0.0 && x <= 1.0))
    throw domain_error("propagate: x must be in [0, 1]");
  if (!(y > 0.0)) throw domain_error("propagate: y must be > 0");
  if (!std::isfinite(delta_prime))
    throw domain_error("propagate: detuning offset must be finite");
  if (pulse.samples.empty()) throw domain_error("propagate: empty pulse");

  std::complex<double> cg = initial.c_g, ce = initial.c_e;
  for (const PulseSample& s : pulse.samples) {
    double w = x * y * s.rabi_amplitude;
    double d = s.detuning + delta_prime;
    double omega_r = std::hypot(w, d);
    if (omega_r == 0.0) continue;
    double theta = 0.5 * omega_r * s.duration;
    double c = std::cos(theta);
    double sn = std::sin(theta) / omega_r;
    // U = cos(theta) I + i sin(theta) (d sigma_z + w sigma_x)/omega_r
    std::complex<double> ugg(c, sn * d);
    std::complex<double> uge(0.0, sn * w);
    std::complex<double> uee(c, -sn * d);
    std::complex<double> cg2 = ugg * cg + uge * ce;
    std::complex<double> ce2 = uge * cg + uee * ce;
    cg = cg2;
    ce = ce2;
  }
  return QubitAmplitudes{cg, ce};
}

TransferResult weighted_average_transfer(const PulseProgram& pulse,
                                         const std::vector<double>& x,
                                         const std::vector<double>& weight,
                                         double y, double delta_prime) {
  if (x.size() != weight.size() || x.empty())
    throw domain_error("weighted transfer: need matching nonempty x, weight");
  double wsum = 0.0;
  for (double w : weight) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw domain_error("weighted transfer: weights must be finite, >= 0");
    wsum += w;
  }
  if (!(wsum > 0.0) || !std::isfinite(wsum))
    throw numeric_error("weighted transfer: weights sum to zero");
  double p = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (weight[i] == 0.0) continue;
    QubitAmplitudes a = propagate(pulse, x[i], y, delta_prime);
    p += weight[i] * std::norm(a.c_e);
  }
  return make_transfer_result(p / wsum);
}

TransferResult thermal_average_transfer(const PulseProgram& pulse,
                                        const EffectiveRabiDistribution& dist,
                                        double y, double delta_prime,
                                        double dx) {
  if (!(dx > 0.0 && dx <= 0.1))
    throw domain_error("thermal transfer: dx must be in (0, 0.1]");
  if (dist.b == 0.0) {
    QubitAmplitudes a = propagate(pulse, 1.0, y, delta_prime);
    return make_transfer_result(std::norm(a.c_e));
  }

  std::vector<double> xs, ws;
  for (std::size_t j = 0;; ++j) {
    double x = (static_cast<double>(j) + 0.5) * dx;
    if (x > 1.0) break;
    xs.push_back(x);
    ws.push_back(effective_pdf(x * dist.omega0, dist));
  }
  double wsum = 0.0;
  for (double w : ws) wsum += w;
  if (!(wsum > 0.0) || !std::isfinite(wsum))
    throw numeric_error(
        "thermal transfer: model weights vanish on the x grid; "
        "use b = 0 for the coherent case");
  return weighted_average_transfer(pulse, xs, ws, y, delta_prime);
}

}  // namespace thermalrabi
