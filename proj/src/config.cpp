#include "thermalrabi/config.hpp"

#include <cmath>
#include <initializer_list>
#include <string>

#include <json.hpp>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/serialization.hpp"

namespace thermalrabi {

namespace {

using nlohmann::json;

[[noreturn]] void fail(std::string_view source, const std::string& what) {
  throw config_error(std::string(source) + ": " + what);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const char* section, std::string_view source) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      fail(source, std::string(section) + ": unknown field '" + item.key() + "'");
  }
}

const json* section(const json& root, const char* name,
                    std::string_view source) {
  if (!root.contains(name)) return nullptr;
  const json& s = root.at(name);
  if (!s.is_object())
    fail(source, std::string(name) + ": expected an object");
  return &s;
}

double get_number(const json& obj, const char* key, const char* section_name,
                  std::string_view source) {
  const json& v = obj.at(key);
  if (!v.is_number())
    fail(source, std::string(section_name) + "." + key + ": expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, const char* key,
                      const char* section_name, std::string_view source) {
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    fail(source, std::string(section_name) + "." + key +
                     ": expected a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

std::vector<double> get_number_list(const json& obj, const char* key,
                                    const char* section_name,
                                    std::string_view source) {
  const json& v = obj.at(key);
  if (!v.is_array())
    fail(source, std::string(section_name) + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number())
      fail(source, std::string(section_name) + "." + key +
                       ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

void require_positive(double value, const char* field, std::string_view source) {
  if (!(value > 0.0) || !std::isfinite(value))
    fail(source, std::string(field) + ": must be positive and finite");
}

}  // namespace

double RunConfig::model_b() const {
  if (b) return *b;
  if (temperature)
    return std::sqrt(*temperature / (calibration_c * doppler_temperature));
  throw config_error("config: temperature or b required");
}

RunConfig preset_config(std::string_view name) {
  RunConfig cfg;
  cfg.preset = name;
  if (name == "base") {
    cfg.temperature = 2.0 * reference_doppler_temperature;
  } else if (name == "map-fine") {
    cfg.b = 7.1e-4;
    cfg.pulse_omega0_cal = two_pi * 332.0e3;
    cfg.pulse_chirp_range_hz = 0.0;
    cfg.window.y_min = 0.004;
    cfg.window.y_max = 0.054;
    cfg.window.delta_min = -two_pi * 5.0e3;
    cfg.window.delta_max = two_pi * 5.0e3;
  } else if (name == "map-chirped") {
    cfg.b = 7.1e-4;
    cfg.pulse_omega0_cal = two_pi * 221.0e3;
    cfg.pulse_chirp_range_hz = 100.0e3;
  } else if (name == "map-fast-chirp") {
    cfg.b = 7.1e-4;
    cfg.pulse_omega0_cal = two_pi * 332.0e3;
    cfg.pulse_chirp_range_hz = 150.0e3;
  } else {
    throw config_error("unknown preset '" + std::string(name) + "'");
  }
  return cfg;
}

RunConfig parse_config(const std::string& json_text, std::string_view source) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(source, e.what());
  }
  if (!root.is_object()) fail(source, "top level must be an object");
  check_keys(root,
             {"schema_version", "preset", "physics", "distribution",
              "calibration", "pulse", "sweep", "rap_scan", "rabi", "fit"},
             "config", source);

  if (root.contains("schema_version")) {
    const json& sv = root.at("schema_version");
    if (!sv.is_number_integer() || sv.get<long long>() != config_schema_version)
      fail(source, "schema_version: this build reads version " +
                       std::to_string(config_schema_version));
  }

  RunConfig cfg;
  if (root.contains("preset")) {
    const json& p = root.at("preset");
    if (!p.is_string()) fail(source, "preset: expected a string");
    cfg = preset_config(p.get<std::string>());
  }

  if (const json* phys = section(root, "physics", source)) {
    check_keys(*phys,
               {"wavelength_nm", "ion_mass_amu", "projection_angles_deg",
                "mode_frequencies_mhz", "doppler_temperature_mk",
                "temperature_mk", "b"},
               "physics", source);
    if (phys->contains("wavelength_nm"))
      cfg.geometry.wavelength =
          get_number(*phys, "wavelength_nm", "physics", source) * 1e-9;
    if (phys->contains("ion_mass_amu"))
      cfg.geometry.ion_mass =
          get_number(*phys, "ion_mass_amu", "physics", source) *
          atomic_mass_unit;
    if (phys->contains("projection_angles_deg")) {
      cfg.geometry.projection_angles.clear();
      for (double deg :
           get_number_list(*phys, "projection_angles_deg", "physics", source))
        cfg.geometry.projection_angles.push_back(deg * pi / 180.0);
    }
    if (phys->contains("mode_frequencies_mhz")) {
      cfg.mode_frequencies.clear();
      for (double mhz :
           get_number_list(*phys, "mode_frequencies_mhz", "physics", source))
        cfg.mode_frequencies.push_back(two_pi * mhz * 1e6);
    }
    if (phys->contains("doppler_temperature_mk"))
      cfg.doppler_temperature =
          get_number(*phys, "doppler_temperature_mk", "physics", source) * 1e-3;
    if (phys->contains("temperature_mk") || phys->contains("b")) {
      cfg.temperature.reset();
      cfg.b.reset();
      if (phys->contains("temperature_mk") && phys->contains("b"))
        fail(source, "physics: give exactly one of temperature_mk and b");
      if (phys->contains("temperature_mk"))
        cfg.temperature =
            get_number(*phys, "temperature_mk", "physics", source) * 1e-3;
      if (phys->contains("b")) {
        cfg.b = get_number(*phys, "b", "physics", source);
        if (*cfg.b < 0.0) fail(source, "physics.b: must be >= 0");
      }
    }
  }

  if (const json* dist = section(root, "distribution", source)) {
    check_keys(*dist,
               {"omega0_khz", "eps_trunc", "sigma_over_omega0", "grid_points",
                "max_tuples"},
               "distribution", source);
    if (dist->contains("omega0_khz"))
      cfg.omega0 =
          two_pi * get_number(*dist, "omega0_khz", "distribution", source) * 1e3;
    if (dist->contains("eps_trunc"))
      cfg.numerics.eps_trunc =
          get_number(*dist, "eps_trunc", "distribution", source);
    if (dist->contains("sigma_over_omega0"))
      cfg.numerics.sigma_over_omega0 =
          get_number(*dist, "sigma_over_omega0", "distribution", source);
    if (dist->contains("grid_points"))
      cfg.numerics.grid_points =
          get_count(*dist, "grid_points", "distribution", source);
    if (dist->contains("max_tuples"))
      cfg.numerics.max_tuples =
          get_count(*dist, "max_tuples", "distribution", source);
  }

  if (const json* cal = section(root, "calibration", source)) {
    check_keys(*cal, {"c", "temperature_grid_over_td"}, "calibration", source);
    if (cal->contains("c"))
      cfg.calibration_c = get_number(*cal, "c", "calibration", source);
    if (cal->contains("temperature_grid_over_td"))
      cfg.calibration_grid =
          get_number_list(*cal, "temperature_grid_over_td", "calibration",
                          source);
  }

  if (const json* pulse = section(root, "pulse", source)) {
    check_keys(*pulse,
               {"omega0_cal_khz", "tau_sigma_us", "chirp_range_khz",
                "n_samples"},
               "pulse", source);
    if (pulse->contains("omega0_cal_khz"))
      cfg.pulse_omega0_cal =
          two_pi * get_number(*pulse, "omega0_cal_khz", "pulse", source) * 1e3;
    if (pulse->contains("tau_sigma_us"))
      cfg.pulse_tau_sigma =
          get_number(*pulse, "tau_sigma_us", "pulse", source) * 1e-6;
    if (pulse->contains("chirp_range_khz")) {
      cfg.pulse_chirp_range_hz =
          get_number(*pulse, "chirp_range_khz", "pulse", source) * 1e3;
      if (cfg.pulse_chirp_range_hz < 0.0)
        fail(source, "pulse.chirp_range_khz: must be >= 0");
    }
    if (pulse->contains("n_samples")) {
      cfg.pulse_n_samples = get_count(*pulse, "n_samples", "pulse", source);
      if (cfg.pulse_n_samples < 2)
        fail(source, "pulse.n_samples: must be >= 2");
    }
  }

  if (const json* sweep = section(root, "sweep", source)) {
    check_keys(*sweep,
               {"y_min", "y_max", "n_y", "delta_min_khz", "delta_max_khz",
                "n_delta", "dx"},
               "sweep", source);
    if (sweep->contains("y_min"))
      cfg.window.y_min = get_number(*sweep, "y_min", "sweep", source);
    if (sweep->contains("y_max"))
      cfg.window.y_max = get_number(*sweep, "y_max", "sweep", source);
    if (sweep->contains("n_y"))
      cfg.window.n_y = get_count(*sweep, "n_y", "sweep", source);
    if (sweep->contains("delta_min_khz"))
      cfg.window.delta_min =
          two_pi * get_number(*sweep, "delta_min_khz", "sweep", source) * 1e3;
    if (sweep->contains("delta_max_khz"))
      cfg.window.delta_max =
          two_pi * get_number(*sweep, "delta_max_khz", "sweep", source) * 1e3;
    if (sweep->contains("n_delta"))
      cfg.window.n_delta = get_count(*sweep, "n_delta", "sweep", source);
    if (sweep->contains("dx")) {
      cfg.dx = get_number(*sweep, "dx", "sweep", source);
      if (!(cfg.dx > 0.0 && cfg.dx <= 1.0))
        fail(source, "sweep.dx: must be in (0, 1]");
    }
  }

  if (const json* scan = section(root, "rap_scan", source)) {
    check_keys(*scan, {"chirp_ranges_khz", "amplitudes_khz"}, "rap_scan",
               source);
    if (scan->contains("chirp_ranges_khz")) {
      cfg.scan_chirp_ranges_hz.clear();
      for (double khz :
           get_number_list(*scan, "chirp_ranges_khz", "rap_scan", source)) {
        if (khz < 0.0) fail(source, "rap_scan.chirp_ranges_khz: must be >= 0");
        cfg.scan_chirp_ranges_hz.push_back(khz * 1e3);
      }
    }
    if (scan->contains("amplitudes_khz")) {
      cfg.scan_amplitudes.clear();
      for (double khz :
           get_number_list(*scan, "amplitudes_khz", "rap_scan", source)) {
        if (!(khz > 0.0)) fail(source, "rap_scan.amplitudes_khz: must be > 0");
        cfg.scan_amplitudes.push_back(two_pi * khz * 1e3);
      }
    }
  }

  if (const json* rabi = section(root, "rabi", source)) {
    check_keys(*rabi, {"t_max_us", "n_points"}, "rabi", source);
    if (rabi->contains("t_max_us")) {
      cfg.rabi_t_max = get_number(*rabi, "t_max_us", "rabi", source) * 1e-6;
      if (cfg.rabi_t_max < 0.0) fail(source, "rabi.t_max_us: must be >= 0");
    }
    if (rabi->contains("n_points")) {
      cfg.rabi_n_points = get_count(*rabi, "n_points", "rabi", source);
      if (cfg.rabi_n_points < 1) fail(source, "rabi.n_points: must be >= 1");
    }
  }

  if (const json* fit = section(root, "fit", source)) {
    check_keys(*fit, {"mode"}, "fit", source);
    if (fit->contains("mode")) {
      const json& m = fit->at("mode");
      if (!m.is_string() ||
          (m.get<std::string>() != "coupled" && m.get<std::string>() != "joint"))
        fail(source, "fit.mode: expected \"coupled\" or \"joint\"");
      cfg.fit_mode = m.get<std::string>() == "coupled" ? FitMode::coupled
                                                       : FitMode::joint;
    }
  }

  require_positive(cfg.geometry.wavelength, "physics.wavelength_nm", source);
  require_positive(cfg.geometry.ion_mass, "physics.ion_mass_amu", source);
  require_positive(cfg.doppler_temperature, "physics.doppler_temperature_mk",
                   source);
  if (cfg.mode_frequencies.empty())
    fail(source, "physics.mode_frequencies_mhz: at least one mode");
  for (double w : cfg.mode_frequencies)
    require_positive(w, "physics.mode_frequencies_mhz", source);
  if (cfg.geometry.projection_angles.size() != cfg.mode_frequencies.size())
    fail(source,
         "physics: projection_angles_deg and mode_frequencies_mhz must have "
         "equal length");
  if (!cfg.temperature && !cfg.b)
    fail(source, "physics: exactly one of temperature_mk and b is required");
  if (cfg.temperature) require_positive(*cfg.temperature, "physics.temperature_mk", source);
  require_positive(cfg.omega0, "distribution.omega0_khz", source);
  if (!(cfg.numerics.eps_trunc > 0.0 && cfg.numerics.eps_trunc < 1.0))
    fail(source, "distribution.eps_trunc: must be in (0, 1)");
  require_positive(cfg.numerics.sigma_over_omega0,
                   "distribution.sigma_over_omega0", source);
  if (cfg.numerics.grid_points < 3)
    fail(source, "distribution.grid_points: must be >= 3");
  require_positive(cfg.calibration_c, "calibration.c", source);
  for (double t : cfg.calibration_grid)
    require_positive(t, "calibration.temperature_grid_over_td", source);
  require_positive(cfg.pulse_omega0_cal, "pulse.omega0_cal_khz", source);
  require_positive(cfg.pulse_tau_sigma, "pulse.tau_sigma_us", source);
  if (!(cfg.window.y_max > cfg.window.y_min))
    fail(source, "sweep: y_max must exceed y_min");
  if (!(cfg.window.delta_max > cfg.window.delta_min))
    fail(source, "sweep: delta_max_khz must exceed delta_min_khz");
  if (cfg.window.n_y < 2 || cfg.window.n_delta < 2)
    fail(source, "sweep: n_y and n_delta must be >= 2");
  return cfg;
}

std::string canonical_config_json(const RunConfig& cfg) {
  json physics{
      {"wavelength_nm", cfg.geometry.wavelength * 1e9},
      {"ion_mass_amu", cfg.geometry.ion_mass / atomic_mass_unit},
      {"doppler_temperature_mk", cfg.doppler_temperature * 1e3},
  };
  json angles = json::array();
  for (double a : cfg.geometry.projection_angles)
    angles.push_back(a * 180.0 / pi);
  physics["projection_angles_deg"] = angles;
  json freqs = json::array();
  for (double w : cfg.mode_frequencies) freqs.push_back(w / (two_pi * 1e6));
  physics["mode_frequencies_mhz"] = freqs;
  if (cfg.temperature) physics["temperature_mk"] = *cfg.temperature * 1e3;
  if (cfg.b) physics["b"] = *cfg.b;

  json scan_chirps = json::array();
  for (double hz : cfg.scan_chirp_ranges_hz) scan_chirps.push_back(hz / 1e3);
  json scan_amps = json::array();
  for (double w : cfg.scan_amplitudes) scan_amps.push_back(w / (two_pi * 1e3));
  json grid = json::array();
  for (double t : cfg.calibration_grid) grid.push_back(t);

  json root{
      {"schema_version", config_schema_version},
      {"preset", cfg.preset},
      {"physics", physics},
      {"distribution",
       json{{"omega0_khz", cfg.omega0 / (two_pi * 1e3)},
            {"eps_trunc", cfg.numerics.eps_trunc},
            {"sigma_over_omega0", cfg.numerics.sigma_over_omega0},
            {"grid_points", cfg.numerics.grid_points},
            {"max_tuples", cfg.numerics.max_tuples}}},
      {"calibration",
       json{{"c", cfg.calibration_c}, {"temperature_grid_over_td", grid}}},
      {"pulse",
       json{{"omega0_cal_khz", cfg.pulse_omega0_cal / (two_pi * 1e3)},
            {"tau_sigma_us", cfg.pulse_tau_sigma * 1e6},
            {"chirp_range_khz", cfg.pulse_chirp_range_hz / 1e3},
            {"n_samples", cfg.pulse_n_samples}}},
      {"sweep",
       json{{"y_min", cfg.window.y_min},
            {"y_max", cfg.window.y_max},
            {"n_y", cfg.window.n_y},
            {"delta_min_khz", cfg.window.delta_min / (two_pi * 1e3)},
            {"delta_max_khz", cfg.window.delta_max / (two_pi * 1e3)},
            {"n_delta", cfg.window.n_delta},
            {"dx", cfg.dx}}},
      {"rap_scan",
       json{{"chirp_ranges_khz", scan_chirps}, {"amplitudes_khz", scan_amps}}},
      {"rabi",
       json{{"t_max_us", cfg.rabi_t_max * 1e6},
            {"n_points", cfg.rabi_n_points}}},
      {"fit",
       json{{"mode", cfg.fit_mode == FitMode::coupled ? "coupled" : "joint"}}},
  };
  return root.dump();
}

std::uint64_t config_hash(const RunConfig& cfg) {
  return fnv1a_hash(canonical_config_json(cfg));
}

}  // namespace thermalrabi
