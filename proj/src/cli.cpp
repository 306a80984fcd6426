#include "thermalrabi/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "thermalrabi/config.hpp"
#include "thermalrabi/constants.hpp"
#include "thermalrabi/dynamics.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/mode_spectrum.hpp"
#include "thermalrabi/rabi_distribution.hpp"
#include "thermalrabi/robustness.hpp"
#include "thermalrabi/serialization.hpp"
#include "thermalrabi/thermometry.hpp"

namespace thermalrabi {

namespace {

namespace fs = std::filesystem;

struct CliState {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;  // reserved; accepted for reproducible pipelines
  unsigned threads = 0;
  RunConfig cfg;
  OutputMeta meta;
};

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot open '" + path.string() + "' for writing");
  return out;
}

fs::path out_path(const CliState& st, const char* name) {
  return fs::path(st.out_dir) / name;
}

void note_written(const fs::path& path) {
  std::cout << "wrote " << path.string() << '\n';
}

// dist and rabi share the enumerate -> smooth -> fit pipeline.
struct DistPipeline {
  DiscreteRabiDistribution exact;
  SmoothedDistribution smoothed;
  BFitResult fit;
};

DistPipeline run_dist_pipeline(const RunConfig& cfg, const char* who) {
  if (!cfg.temperature)
    throw config_error(std::string(who) +
                       " requires physics.temperature_mk (the exact "
                       "distribution is enumerated at a temperature)");
  DistPipeline p;
  ModeSet modes =
      make_mode_set(cfg.geometry, cfg.mode_frequencies, *cfg.temperature);
  p.exact = enumerate_distribution(modes, cfg.omega0, cfg.numerics.eps_trunc,
                                   cfg.numerics.max_tuples);
  p.smoothed = smooth_distribution(
      p.exact, cfg.numerics.sigma_over_omega0 * cfg.omega0,
      cfg.numerics.grid_points);
  p.fit = fit_b(p.smoothed, cfg.omega0);
  return p;
}

void cmd_dist(const CliState& st) {
  DistPipeline p = run_dist_pipeline(st.cfg, "dist");
  {
    auto out = open_out(out_path(st, "exact_distribution.csv"));
    write_exact_distribution_csv(out, p.exact, st.meta);
    note_written(out_path(st, "exact_distribution.csv"));
  }
  {
    auto out = open_out(out_path(st, "smoothed_distribution.csv"));
    write_smoothed_distribution_csv(out, p.smoothed, st.meta);
    note_written(out_path(st, "smoothed_distribution.csv"));
  }
  {
    auto model = make_effective_distribution(st.cfg.omega0, p.fit.b);
    auto out = open_out(out_path(st, "model_distribution.csv"));
    write_model_distribution_csv(out, model, p.smoothed.grid, st.meta);
    note_written(out_path(st, "model_distribution.csv"));
  }
  {
    auto out = open_out(out_path(st, "fit_summary.json"));
    write_fit_summary_json(out, p.fit, st.cfg.omega0, st.meta);
    note_written(out_path(st, "fit_summary.json"));
  }
}

void cmd_rabi(const CliState& st) {
  DistPipeline p = run_dist_pipeline(st.cfg, "rabi");
  std::vector<double> times;
  if (st.cfg.rabi_t_max == 0.0 || st.cfg.rabi_n_points == 1) {
    times.push_back(0.0);
  } else {
    const std::size_t n = st.cfg.rabi_n_points;
    for (std::size_t i = 0; i < n; ++i)
      times.push_back(st.cfg.rabi_t_max * static_cast<double>(i) /
                      static_cast<double>(n - 1));
  }
  std::vector<double> p_exact;
  p_exact.reserve(times.size());
  for (double t : times) p_exact.push_back(square_pulse_exact(p.exact, t));
  auto model = make_effective_distribution(st.cfg.omega0, p.fit.b);
  std::vector<double> p_eff = square_pulse_effective(model, times);
  auto out = open_out(out_path(st, "rabi_trace.csv"));
  write_rabi_compare_csv(out, times, p_exact, p_eff, st.meta);
  note_written(out_path(st, "rabi_trace.csv"));
}

void cmd_rap_scan(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  if (cfg.scan_amplitudes.empty())
    throw config_error("rap-scan requires rap_scan.amplitudes_khz");
  const double b = cfg.model_b();
  const auto eff = make_effective_distribution(cfg.omega0, b);
  for (double chirp_hz : cfg.scan_chirp_ranges_hz) {
    std::vector<double> p_transfer;
    p_transfer.reserve(cfg.scan_amplitudes.size());
    for (double amp : cfg.scan_amplitudes) {
      PulseProgram pulse = build_rap_pulse(amp, cfg.pulse_tau_sigma, chirp_hz,
                                           cfg.pulse_n_samples);
      p_transfer.push_back(
          thermal_average_transfer(pulse, eff, 1.0, 0.0, cfg.dx).p_excited);
    }
    std::string name =
        "rap_scan_rc" + format_double(chirp_hz / 1e3) + "khz.csv";
    auto out = open_out(out_path(st, name.c_str()));
    write_rap_scan_csv(out, cfg.scan_amplitudes, p_transfer, st.meta);
    note_written(out_path(st, name.c_str()));
  }
}

void cmd_fit(const CliState& st, const std::string& trace_path,
             const std::string& mode_override) {
  std::ifstream in(trace_path);
  if (!in) throw config_error("cannot open trace '" + trace_path + "'");
  RabiTrace trace = read_trace_csv(in, trace_path);
  FitMode mode = st.cfg.fit_mode;
  if (mode_override == "coupled") mode = FitMode::coupled;
  else if (mode_override == "joint") mode = FitMode::joint;
  else if (!mode_override.empty())
    throw config_error("fit: --mode must be coupled or joint");
  TemperatureCalibration cal;
  cal.c = st.cfg.calibration_c;
  cal.doppler_temperature = st.cfg.doppler_temperature;
  ThermometryResult result = fit_thermal_rabi(trace, cal, mode);
  auto out = open_out(out_path(st, "thermometry.json"));
  write_thermometry_json(out, result, st.meta);
  note_written(out_path(st, "thermometry.json"));
  if (result.envelope_flat)
    std::cerr << "warning: envelope is flat; b is an upper bound, not a "
                 "measurement\n";
}

void cmd_map(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  PulseProgram pulse =
      build_rap_pulse(cfg.pulse_omega0_cal, cfg.pulse_tau_sigma,
                      cfg.pulse_chirp_range_hz, cfg.pulse_n_samples);
  const auto eff = make_effective_distribution(cfg.omega0, cfg.model_b());
  RobustnessMap map =
      sweep_robustness(pulse, eff, cfg.window, cfg.dx, st.threads);
  {
    auto out = open_out(out_path(st, "map.csv"));
    write_map_csv(out, map, st.meta);
    note_written(out_path(st, "map.csv"));
  }
  {
    auto out = open_out(out_path(st, "map.json"));
    write_map_json(out, map, st.meta);
    note_written(out_path(st, "map.json"));
  }
}

void cmd_calibrate_c(const CliState& st) {
  const RunConfig& cfg = st.cfg;
  if (cfg.calibration_grid.size() < 5)
    throw config_error(
        "calibrate-c needs at least five temperatures in "
        "calibration.temperature_grid_over_td");
  std::vector<double> temps;
  temps.reserve(cfg.calibration_grid.size());
  for (double t : cfg.calibration_grid)
    temps.push_back(t * cfg.doppler_temperature);
  TemperatureCalibration cal =
      calibrate_c(cfg.geometry, cfg.mode_frequencies, cfg.doppler_temperature,
                  temps, cfg.numerics);
  auto out = open_out(out_path(st, "calibration.json"));
  write_calibration_json(out, cal, st.meta);
  note_written(out_path(st, "calibration.json"));
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"two-level trapped-ion qubit with a thermally fluctuating "
               "Rabi frequency: distributions, dephasing traces, "
               "thermometry fits, RAP robustness maps"};
  app.require_subcommand(1);
  app.fallthrough();

  CliState st;
  app.add_option("--config", st.config_path, "JSON config path");
  app.add_option("--out", st.out_dir, "output directory (default .)");
  app.add_option("--seed", st.seed, "RNG seed for synthetic pipelines");
  app.add_option("--threads", st.threads,
                 "worker cap inside sweeps (0 = hardware)");

  auto* dist = app.add_subcommand(
      "dist", "exact, smoothed, and fitted Rabi-frequency distributions");
  auto* rabi = app.add_subcommand(
      "rabi", "square-pulse trace from the exact and model distributions");
  double t_max_us = -1.0;
  long long n_points = -1;
  rabi->add_option("--t-max-us", t_max_us, "trace end time");
  rabi->add_option("--points", n_points, "number of durations");
  auto* rap = app.add_subcommand(
      "rap-scan", "transfer vs calibrated peak amplitude, one CSV per chirp");
  auto* fit = app.add_subcommand("fit", "thermometry fit of a measured trace");
  std::string trace_path, mode_override;
  fit->add_option("--trace", trace_path, "trace CSV path")->required();
  fit->add_option("--mode", mode_override, "coupled | joint");
  auto* map = app.add_subcommand(
      "map", "thermally averaged RAP infidelity over (y, delta')");
  auto* cal = app.add_subcommand(
      "calibrate-c", "temperature calibration over a T/T_D grid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (!st.config_path.empty()) {
      std::ifstream in(st.config_path);
      if (!in)
        throw config_error("cannot open config '" + st.config_path + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      st.cfg = parse_config(buf.str(), st.config_path);
    } else {
      st.cfg = preset_config("base");
    }
    if (t_max_us >= 0.0) st.cfg.rabi_t_max = t_max_us * 1e-6;
    if (n_points >= 0) {
      if (n_points < 1) throw config_error("rabi: --points must be >= 1");
      st.cfg.rabi_n_points = static_cast<std::size_t>(n_points);
    }
    st.meta.config_hash = config_hash(st.cfg);
    fs::create_directories(st.out_dir);

    if (dist->parsed()) cmd_dist(st);
    if (rabi->parsed()) cmd_rabi(st);
    if (rap->parsed()) cmd_rap_scan(st);
    if (fit->parsed()) cmd_fit(st, trace_path, mode_override);
    if (map->parsed()) cmd_map(st);
    if (cal->parsed()) cmd_calibrate_c(st);
    return 0;
  } catch (const config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace thermalrabi
