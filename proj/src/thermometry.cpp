#include "thermalrabi/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/dynamics.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/numerics.hpp"

namespace thermalrabi {

namespace {

constexpr double kPeakFactor = 65536.0;  // 2^16, peak-time relation
constexpr double kBLower = 1.0e-6;
constexpr double kBUpper = 3.0e-2;
constexpr double kPClampLo = 0.02;
constexpr double kPClampHi = 0.98;
constexpr int kScanNodes = 256;   // quadrature during coarse scans
constexpr int kGridNodes = 512;   // quadrature during bracket refinement
constexpr int kFullNodes = 1024;  // quadrature for reported values
constexpr double kBFlat = 1.0e-5;  // below this the envelope says nothing

void validate_trace(const RabiTrace& trace, std::size_t min_points) {
  if (trace.points.size() < min_points)
    throw domain_error("trace has too few points");
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    const auto& pt = trace.points[i];
    if (pt.p_excited < 0.0 || pt.p_excited > 1.0)
      throw domain_error("trace p_excited outside [0, 1]");
    if (pt.std_err < 0.0) throw domain_error("trace std_err negative");
    if (i > 0 && pt.duration <= trace.points[i - 1].duration)
      throw domain_error("trace durations must be strictly increasing");
  }
}

double shot_variance(const TracePoint& pt) {
  const double p = std::clamp(pt.p_excited, kPClampLo, kPClampHi);
  const int n = pt.n_shots > 0 ? pt.n_shots : 200;
  return p * (1.0 - p) / static_cast<double>(n);
}

double omega0_from_peak(double tau_max, double b) {
  return (pi / tau_max) * (1.0 + kPeakFactor * b * b);
}

}  // namespace

double PowerCalibration::omega0_at(double amplitude, bool* clamped) const {
  const double a = std::clamp(amplitude, amp_min, amp_max);
  if (clamped) *clamped = (a != amplitude);
  return numerics::polyval(coefficients, a);
}

double find_tau_max(const RabiTrace& trace) {
  validate_trace(trace, 3);
  const auto& pts = trace.points;
  const std::size_t n = pts.size();

  // Candidate selection runs on a 3-point moving average so single-shot
  // noise bumps on the rising flank do not pass as maxima; the parabolic
  // refinement below still uses the raw samples.
  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = pts[i > 0 ? i - 1 : 0].p_excited;
    const double next = pts[i + 1 < n ? i + 1 : n - 1].p_excited;
    smooth[i] = (prev + pts[i].p_excited + next) / 3.0;
  }
  double gmax = 0.0;
  for (double v : smooth) gmax = std::max(gmax, v);

  std::size_t peak = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (smooth[i] >= smooth[i - 1] && smooth[i] >= smooth[i + 1] &&
        smooth[i] >= 0.88 * gmax) {
      peak = i;
      break;
    }
  }
  if (peak == 0)
    throw fit_error("find_tau_max: trace has no interior maximum");

  const double t0 = pts[peak - 1].duration, y0 = pts[peak - 1].p_excited;
  const double t1 = pts[peak].duration, y1 = pts[peak].p_excited;
  const double t2 = pts[peak + 1].duration, y2 = pts[peak + 1].p_excited;
  double vertex = numerics::parabola_vertex(t0, y0, t1, y1, t2, y2);
  if (!std::isfinite(vertex)) vertex = t1;
  return std::clamp(vertex, t0, t2);
}

ThermometryResult fit_thermal_rabi(const RabiTrace& trace,
                                   const TemperatureCalibration& calibration,
                                   FitMode mode) {
  validate_trace(trace, 8);
  if (calibration.c <= 0.0)
    throw domain_error("fit_thermal_rabi: calibration constant must be > 0");

  ThermometryResult result;
  result.mode = mode;
  result.calibration_c = calibration.c;
  result.doppler_temperature = calibration.doppler_temperature;

  result.tau_max = find_tau_max(trace);
  const double span = trace.points.back().duration;
  if (span < 3.0 * result.tau_max)
    throw domain_error(
        "fit_thermal_rabi: trace must span at least 3 tau_max for the "
        "envelope to constrain b");

  std::vector<double> times(trace.points.size());
  std::vector<double> weights(trace.points.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    times[i] = trace.points[i].duration;
    weights[i] = 1.0 / shot_variance(trace.points[i]);
  }

  // The joint global scans cost O(grid cells x nodes x points); past 1600
  // points they run on a strided subset instead. Thinning only steers the
  // basin choice; the polish and the reported values see every point.
  const std::size_t stride =
      times.size() > 1600 ? (times.size() + 1199) / 1200 : 1;
  std::vector<double> scan_times, scan_p, scan_weights;
  for (std::size_t i = 0; i < times.size(); i += stride) {
    scan_times.push_back(times[i]);
    scan_p.push_back(trace.points[i].p_excited);
    scan_weights.push_back(weights[i]);
  }

  // One reweighting pass sets the shot-noise variances from the fitted
  // model instead of the measured points; weighting by the measured value
  // correlates weight with residual and drags the envelope up.
  auto reweight_from_model = [&](double omega0, double b) {
    const std::vector<double> model = square_pulse_effective(
        make_effective_distribution(omega0, b), times, kFullNodes);
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double p = std::clamp(model[i], kPClampLo, kPClampHi);
      const int n = trace.points[i].n_shots > 0 ? trace.points[i].n_shots : 200;
      weights[i] = static_cast<double>(n) / (p * (1.0 - p));
    }
  };

  auto sse_at = [&](double omega0, double b, int nodes) {
    const std::vector<double> model = square_pulse_effective(
        make_effective_distribution(omega0, b), times, nodes);
    numerics::KahanSum acc;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double r = trace.points[i].p_excited - model[i];
      acc.add(weights[i] * r * r);
    }
    return acc.value();
  };
  auto sse_scan = [&](double omega0, double b, int nodes) {
    const std::vector<double> model = square_pulse_effective(
        make_effective_distribution(omega0, b), scan_times, nodes);
    numerics::KahanSum acc;
    for (std::size_t i = 0; i < scan_times.size(); ++i) {
      const double r = scan_p[i] - model[i];
      acc.add(scan_weights[i] * r * r);
    }
    return acc.value();
  };

  const double ln_lo = std::log(kBLower);
  const double ln_hi = std::log(kBUpper);

  // Global 1-D minimum in ln b: coarse scan, then bracketed refinement
  // around the best cell. Returns the refined ln b; flags edge cells.
  auto minimize_ln_b = [&](const std::function<double(double)>& coarse,
                           const std::function<double(double)>& fine, int cells,
                           bool* lo_edge, bool* up_edge) {
    int best = 0;
    double best_f = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= cells; ++j) {
      const double lb = ln_lo + (ln_hi - ln_lo) * j / cells;
      const double fj = coarse(lb);
      if (fj < best_f) {
        best_f = fj;
        best = j;
      }
    }
    *lo_edge = best == 0;
    *up_edge = best == cells;
    const double a = ln_lo + (ln_hi - ln_lo) * std::max(best - 1, 0) / cells;
    const double c = ln_lo + (ln_hi - ln_lo) * std::min(best + 1, cells) / cells;
    return numerics::brent_minimize(fine, a, c, 1.0e-7);
  };

  auto sse_coupled_coarse = [&](double log_b) {
    const double b = std::exp(log_b);
    return sse_at(omega0_from_peak(result.tau_max, b), b, kScanNodes);
  };
  auto sse_coupled = [&](double log_b) {
    const double b = std::exp(log_b);
    return sse_at(omega0_from_peak(result.tau_max, b), b, kGridNodes);
  };
  bool lo_edge = false, up_edge = false;
  auto stage2 =
      minimize_ln_b(sse_coupled_coarse, sse_coupled, 96, &lo_edge, &up_edge);
  if (up_edge)
    throw fit_error(
        "fit_thermal_rabi: b ran into the upper bracket; trace is not "
        "described by the thermal dephasing model");
  result.b = std::exp(stage2.x);
  result.envelope_flat = lo_edge || result.b <= kBFlat;
  result.omega0 = omega0_from_peak(result.tau_max, result.b);
  result.sse = sse_at(result.omega0, result.b, kFullNodes);

  if (mode == FitMode::coupled) {
    reweight_from_model(result.omega0, result.b);
    const double lb = std::log(result.b);
    auto refit = numerics::brent_minimize(
        sse_coupled, std::max(lb - 0.5, ln_lo), std::min(lb + 0.5, ln_hi),
        1.0e-7);
    result.b = std::exp(refit.x);
    result.envelope_flat = result.envelope_flat || result.b <= kBFlat;
    result.omega0 = omega0_from_peak(result.tau_max, result.b);
    result.sse = sse_at(result.omega0, result.b, kFullNodes);
  }

  if (mode == FitMode::joint) {
    // The peak-time relation underestimates the true first-maximum time of
    // the averaged trace, so the joint search opens the omega0 bracket well
    // above pi / tau_max and re-runs the global b scan at each candidate.
    const double w_tau = pi / result.tau_max;
    double best_w = result.omega0, best_b = result.b;
    double best_f = std::numeric_limits<double>::infinity();
    double second_w = best_w, second_b = best_b;
    double second_f = best_f;
    for (int iw = 0; iw <= 52; ++iw) {
      const double w = w_tau * (0.80 + 0.0125 * iw);
      auto sse_b_coarse = [&](double log_b) {
        return sse_scan(w, std::exp(log_b), kScanNodes);
      };
      auto sse_b = [&](double log_b) {
        return sse_scan(w, std::exp(log_b), kGridNodes);
      };
      bool le = false, ue = false;
      auto r = minimize_ln_b(sse_b_coarse, sse_b, 48, &le, &ue);
      if (r.f < best_f) {
        if (std::fabs(best_w - w) > 1.5 * 0.0125 * w_tau) {
          second_f = best_f;
          second_w = best_w;
          second_b = best_b;
        }
        best_f = r.f;
        best_w = w;
        best_b = std::exp(r.x);
      } else if (r.f < second_f &&
                 std::fabs(best_w - w) > 1.5 * 0.0125 * w_tau) {
        second_f = r.f;
        second_w = w;
        second_b = std::exp(r.x);
      }
    }

    // The frequency basin narrows as 1/(omega0 t_end); rescan between the
    // coarse grid neighbors around the two leading candidates so long
    // traces cannot slip through the grid.
    const double centers_w[2] = {best_w, second_w};
    const double centers_b[2] = {best_b, second_b};
    for (int c = 0; c < 2; ++c) {
      if (c == 1 && !(second_f < std::numeric_limits<double>::infinity()))
        break;
      const double w_center = centers_w[c];
      const double lb_center = std::log(centers_b[c]);
      for (int k = -6; k <= 6; ++k) {
        if (c == 0 && k == 0) continue;
        const double w = w_center * (1.0 + 0.002 * k);
        auto sse_b = [&](double log_b) {
          return sse_scan(w, std::exp(log_b), kGridNodes);
        };
        auto r = numerics::brent_minimize(
            sse_b, std::max(lb_center - 0.75, ln_lo),
            std::min(lb_center + 0.75, ln_hi), 1.0e-6);
        if (r.f < best_f) {
          best_f = r.f;
          best_w = w;
          best_b = std::exp(r.x);
        }
      }
    }

    // Guarded Newton polish on the (omega0, ln b) surface.
    auto newton_polish = [&](double& w0, double& b0, double& f0) {
      f0 = sse_at(w0, b0, kFullNodes);
      for (int iter = 0; iter < 12; ++iter) {
        const double hw = std::max(w0 * 2.0e-5, 1.0);
        const double hl = 2.0e-3;  // step in ln b
        const double lb = std::log(b0);
        auto s = [&](double w, double l) {
          return sse_at(w, std::exp(l), kFullNodes);
        };
        const double s0 = f0;
        const double swp = s(w0 + hw, lb), swm = s(w0 - hw, lb);
        const double sbp = s(w0, lb + hl), sbm = s(w0, lb - hl);
        const double gw = (swp - swm) / (2.0 * hw);
        const double gb = (sbp - sbm) / (2.0 * hl);
        const double hww = (swp - 2.0 * s0 + swm) / (hw * hw);
        const double hbb = (sbp - 2.0 * s0 + sbm) / (hl * hl);
        const double hwb = (s(w0 + hw, lb + hl) - s(w0 + hw, lb - hl) -
                            s(w0 - hw, lb + hl) + s(w0 - hw, lb - hl)) /
                           (4.0 * hw * hl);
        const double det = hww * hbb - hwb * hwb;
        if (!(det > 0.0) || !(hww > 0.0)) break;
        double dw = -(hbb * gw - hwb * gb) / det;
        double dl = -(hww * gb - hwb * gw) / det;
        dw = std::clamp(dw, -0.02 * w0, 0.02 * w0);
        dl = std::clamp(dl, -0.2, 0.2);
        double w_new = w0 + dw;
        double l_new = std::clamp(lb + dl, ln_lo, ln_hi);
        double f_new = s(w_new, l_new);
        int halvings = 0;
        while (f_new > s0 && halvings < 6) {
          dw *= 0.5;
          dl *= 0.5;
          w_new = w0 + dw;
          l_new = std::clamp(lb + dl, ln_lo, ln_hi);
          f_new = s(w_new, l_new);
          ++halvings;
        }
        if (f_new > s0) break;
        w0 = w_new;
        b0 = std::exp(l_new);
        const bool converged =
            std::fabs(dw) < 1.0e-9 * w0 && std::fabs(dl) < 1.0e-7;
        f0 = f_new;
        if (converged) break;
      }
    };

    newton_polish(best_w, best_b, best_f);
    for (int round = 0; round < 2; ++round) {
      reweight_from_model(best_w, best_b);
      newton_polish(best_w, best_b, best_f);
    }

    if (best_b >= kBUpper / 1.5)
      throw fit_error(
          "fit_thermal_rabi: b ran into the upper bracket; trace is not "
          "described by the thermal dephasing model");
    result.omega0 = best_w;
    result.b = best_b;
    result.sse = best_f;
    result.envelope_flat = best_b <= kBFlat;
  }

  // Local quadratic model of the weighted SSE surface; delta-SSE of one
  // marks the single-parameter confidence scale.
  if (mode == FitMode::joint) {
    const double hw = std::max(result.omega0 * 1.0e-5, 1.0);
    const double hb = std::max(result.b * 1.0e-3, 1.0e-9);
    const double w = result.omega0, b = result.b, s0 = result.sse;
    const double hww = (sse_at(w + hw, b, kFullNodes) - 2.0 * s0 +
                        sse_at(w - hw, b, kFullNodes)) /
                       (hw * hw);
    const double hbb = (sse_at(w, b + hb, kFullNodes) - 2.0 * s0 +
                        sse_at(w, b - hb, kFullNodes)) /
                       (hb * hb);
    const double hwb = (sse_at(w + hw, b + hb, kFullNodes) -
                        sse_at(w + hw, b - hb, kFullNodes) -
                        sse_at(w - hw, b + hb, kFullNodes) +
                        sse_at(w - hw, b - hb, kFullNodes)) /
                       (4.0 * hw * hb);
    const double det = hww * hbb - hwb * hwb;
    if (det > 0.0 && hww > 0.0) {
      result.b_err = std::sqrt(2.0 * hww / det);
      result.omega0_err = std::sqrt(2.0 * hbb / det);
    } else {
      result.b_err = hbb > 0.0 ? std::sqrt(2.0 / hbb) : 0.0;
      result.omega0_err = hww > 0.0 ? std::sqrt(2.0 / hww) : 0.0;
    }
  } else {
    const double h = std::max(result.b * 1.0e-3, 1.0e-9);
    const double s0 = result.sse;
    const double sp = sse_at(omega0_from_peak(result.tau_max, result.b + h),
                             result.b + h, kFullNodes);
    const double sm = sse_at(omega0_from_peak(result.tau_max, result.b - h),
                             result.b - h, kFullNodes);
    const double curv = (sp - 2.0 * s0 + sm) / (h * h);
    result.b_err = curv > 0.0 ? std::sqrt(2.0 / curv) : 0.0;
  }

  // Peak-time uncertainty from the interpolation triple; in coupled mode it
  // propagates through the peak-time relation to omega0.
  {
    const auto& pts = trace.points;
    std::size_t peak = 1;
    double best = -1.0;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i)
      if (pts[i].p_excited > best) {
        best = pts[i].p_excited;
        peak = i;
      }
    const double dt = 0.5 * (pts[peak + 1].duration - pts[peak - 1].duration);
    const double ym = pts[peak - 1].p_excited, y0 = pts[peak].p_excited,
                 yp = pts[peak + 1].p_excited;
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) {
      const double num = ym - yp;
      const double dm = 0.5 * dt * (1.0 / denom - num / (denom * denom));
      const double d0 = 0.5 * dt * (2.0 * num / (denom * denom));
      const double dp = 0.5 * dt * (-1.0 / denom - num / (denom * denom));
      result.tau_max_err = std::sqrt(dm * dm * shot_variance(pts[peak - 1]) +
                                     d0 * d0 * shot_variance(pts[peak]) +
                                     dp * dp * shot_variance(pts[peak + 1]));
    }
    if (mode != FitMode::joint) {
      const double dwdt = result.omega0 / result.tau_max;
      const double dwdb = (pi / result.tau_max) * 2.0 * kPeakFactor * result.b;
      result.omega0_err = std::sqrt(dwdt * dwdt * result.tau_max_err *
                                        result.tau_max_err +
                                    dwdb * dwdb * result.b_err * result.b_err);
    }
  }

  result.temperature_over_td = calibration.c * result.b * result.b;
  result.temperature_err_over_td = 2.0 * calibration.c * result.b * result.b_err;
  return result;
}

PowerCalibration fit_power_calibration(
    const std::vector<CalibrationInput>& points) {
  if (points.size() < 5)
    throw domain_error("fit_power_calibration: need at least 5 points");
  std::vector<double> amps, omegas;
  amps.reserve(points.size());
  omegas.reserve(points.size());
  for (const auto& p : points) {
    amps.push_back(p.amplitude);
    omegas.push_back(p.omega0);
  }

  PowerCalibration cal;
  cal.coefficients = numerics::polyfit(amps, omegas, 3);
  cal.amp_min = *std::min_element(amps.begin(), amps.end());
  cal.amp_max = *std::max_element(amps.begin(), amps.end());

  const auto& c = cal.coefficients;
  for (int i = 0; i <= 256; ++i) {
    const double a = cal.amp_min + (cal.amp_max - cal.amp_min) * i / 256.0;
    const double slope = c[1] + 2.0 * c[2] * a + 3.0 * c[3] * a * a;
    if (slope <= 0.0)
      throw fit_error(
          "fit_power_calibration: fitted cubic is not monotonic over the "
          "calibrated range");
  }
  return cal;
}

RabiTrace synthesize_trace(double omega0, double b, double t_end,
                           std::size_t n_points, int n_shots,
                           std::optional<std::uint64_t> seed) {
  if (omega0 <= 0.0) throw domain_error("synthesize_trace: omega0 must be > 0");
  if (b < 0.0) throw domain_error("synthesize_trace: b must be >= 0");
  if (t_end <= 0.0 || n_points == 0)
    throw domain_error("synthesize_trace: empty trace requested");
  if (n_shots <= 0) throw domain_error("synthesize_trace: n_shots must be > 0");

  std::mt19937_64 rng(seed.value_or(0));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::vector<double> times(n_points);
  for (std::size_t i = 0; i < n_points; ++i)
    times[i] = t_end * static_cast<double>(i + 1) / static_cast<double>(n_points);
  const std::vector<double> model =
      square_pulse_effective(make_effective_distribution(omega0, b), times);

  RabiTrace trace;
  trace.points.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    TracePoint pt;
    pt.duration = times[i];
    double p = model[i];
    if (seed) {
      int hits = 0;
      for (int s = 0; s < n_shots; ++s)
        if (uniform(rng) < p) ++hits;
      p = static_cast<double>(hits) / n_shots;
    }
    pt.p_excited = p;
    pt.n_shots = n_shots;
    pt.std_err = std::sqrt(shot_variance(pt));
    trace.points.push_back(pt);
  }
  return trace;
}

}  // namespace thermalrabi
