#include "thermalrabi/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "thermalrabi/errors.hpp"

namespace thermalrabi {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = lo;
    return v;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
  return v;
}

}  // namespace

RobustnessMap sweep_robustness(const PulseProgram& pulse,
                               const EffectiveRabiDistribution& eff,
                               const SweepWindow& window, double dx,
                               unsigned threads) {
  if (window.n_y < 2 || window.n_delta < 2)
    throw domain_error("sweep_robustness: grid must be at least 2x2");
  if (window.y_max <= window.y_min || window.delta_max <= window.delta_min)
    throw domain_error("sweep_robustness: empty sweep window");

  RobustnessMap map;
  map.y_axis = linspace(window.y_min, window.y_max, window.n_y);
  map.delta_axis = linspace(window.delta_min, window.delta_max, window.n_delta);
  map.values.assign(window.n_y, std::vector<double>(window.n_delta, 0.0));
  map.pulse = pulse.metadata;
  map.omega0 = eff.omega0;
  map.b = eff.b;
  map.dx = dx;

  unsigned n_workers = threads ? threads : std::thread::hardware_concurrency();
  n_workers = std::clamp<unsigned>(n_workers, 1,
                                   static_cast<unsigned>(window.n_y));

  auto run_rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < window.n_y; i += stride) {
      const double y = map.y_axis[i];
      for (std::size_t j = 0; j < window.n_delta; ++j) {
        auto res = thermal_average_transfer(pulse, eff, y, map.delta_axis[j], dx);
        map.values[i][j] = res.log10_infidelity;
      }
    }
  };

  if (n_workers == 1) {
    run_rows(0, 1);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w)
      pool.emplace_back(run_rows, w, n_workers);
    for (auto& t : pool) t.join();
  }
  return map;
}

double map_minimum_infidelity(const RobustnessMap& map) {
  double best = 1.0;
  for (const auto& row : map.values)
    for (double v : row) best = std::min(best, std::pow(10.0, v));
  return best;
}

TransferResult parasitic_transfer_check(const PulseProgram& pulse,
                                        const EffectiveRabiDistribution& eff,
                                        double offset, double dx) {
  double bandwidth = 0.0;
  for (const auto& s : pulse.samples)
    bandwidth = std::max(bandwidth, std::fabs(s.detuning) + s.rabi_amplitude);
  if (std::fabs(offset) < 5.0 * bandwidth)
    throw domain_error(
        "parasitic_transfer_check: offset must lie far outside the pulse "
        "bandwidth");
  return thermal_average_transfer(pulse, eff, 1.0, offset, dx);
}

}  // namespace thermalrabi
