#include "thermalrabi/serialization.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"

namespace thermalrabi {

namespace {

using nlohmann::json;

json meta_json(const OutputMeta& meta) {
  return json{{"version", meta.version}, {"config_hash", hash_hex(meta.config_hash)}};
}

void dump_json(std::ostream& out, const json& j) {
  out << j.dump(2) << '\n';
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail_line(std::string_view source, std::size_t line_no,
                            const std::string& what) {
  throw config_error(std::string(source) + ": line " + std::to_string(line_no) +
                     ": " + what);
}

double parse_double(std::string_view token, std::string_view source,
                    std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value))
    fail_line(source, line_no,
              "cannot parse '" + std::string(token) + "' as a number");
  return value;
}

int parse_int(std::string_view token, std::string_view source,
              std::size_t line_no) {
  int value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last)
    fail_line(source, line_no,
              "cannot parse '" + std::string(token) + "' as an integer");
  return value;
}

}  // namespace

std::string tool_version() { return THERMALRABI_VERSION; }

std::uint64_t fnv1a_hash(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw numeric_error("format_double: to_chars failed");
  return std::string(buf, ptr);
}

void write_meta_header(std::ostream& out, const OutputMeta& meta) {
  out << "# thermalrabi " << meta.version << '\n';
  out << "# config " << hash_hex(meta.config_hash) << '\n';
}

void write_exact_distribution_csv(std::ostream& out,
                                  const DiscreteRabiDistribution& dist,
                                  const OutputMeta& meta) {
  write_meta_header(out, meta);
  out << "omega_hz,probability\n";
  for (const auto& pt : dist.points)
    out << format_double(hz_from_angular(pt.omega)) << ','
        << format_double(pt.probability) << '\n';
}

void write_smoothed_distribution_csv(std::ostream& out,
                                     const SmoothedDistribution& smoothed,
                                     const OutputMeta& meta) {
  write_meta_header(out, meta);
  out << "omega_hz,density_per_hz\n";
  for (std::size_t i = 0; i < smoothed.grid.size(); ++i)
    out << format_double(hz_from_angular(smoothed.grid[i])) << ','
        << format_double(smoothed.density[i] * two_pi) << '\n';
}

void write_model_distribution_csv(std::ostream& out,
                                  const EffectiveRabiDistribution& dist,
                                  const std::vector<double>& grid,
                                  const OutputMeta& meta) {
  write_meta_header(out, meta);
  out << "omega_hz,density_per_hz\n";
  for (double omega : grid)
    out << format_double(hz_from_angular(omega)) << ','
        << format_double(effective_pdf(omega, dist) * two_pi) << '\n';
}

void write_fit_summary_json(std::ostream& out, const BFitResult& fit,
                            double omega0, const OutputMeta& meta) {
  dump_json(out, json{{"meta", meta_json(meta)},
                      {"b", fit.b},
                      {"residual", fit.residual},
                      {"omega0_khz", hz_from_angular(omega0) / 1e3}});
}

void write_calibration_json(std::ostream& out,
                            const TemperatureCalibration& calibration,
                            const OutputMeta& meta) {
  json points = json::array();
  for (const auto& pt : calibration.points)
    points.push_back(json{{"t_over_td", pt.t_over_td}, {"b", pt.b}});
  dump_json(out, json{{"meta", meta_json(meta)},
                      {"c", calibration.c},
                      {"doppler_temperature_mk",
                       calibration.doppler_temperature * 1e3},
                      {"fit_residual", calibration.fit_residual},
                      {"r_squared", calibration.r_squared},
                      {"r_squared_centered", calibration.r_squared_centered},
                      {"points", points}});
}

void write_rabi_compare_csv(std::ostream& out,
                            const std::vector<double>& durations,
                            const std::vector<double>& p_exact,
                            const std::vector<double>& p_effective,
                            const OutputMeta& meta) {
  if (durations.size() != p_exact.size() || durations.size() != p_effective.size())
    throw domain_error("write_rabi_compare_csv: column length mismatch");
  write_meta_header(out, meta);
  out << "duration_us,p_exact,p_effective\n";
  for (std::size_t i = 0; i < durations.size(); ++i)
    out << format_double(durations[i] * 1e6) << ','
        << format_double(p_exact[i]) << ',' << format_double(p_effective[i])
        << '\n';
}

void write_rap_scan_csv(std::ostream& out,
                        const std::vector<double>& omega0_cal,
                        const std::vector<double>& p_transfer,
                        const OutputMeta& meta) {
  if (omega0_cal.size() != p_transfer.size())
    throw domain_error("write_rap_scan_csv: column length mismatch");
  write_meta_header(out, meta);
  out << "omega0_cal_khz,p_transfer\n";
  for (std::size_t i = 0; i < omega0_cal.size(); ++i)
    out << format_double(hz_from_angular(omega0_cal[i]) / 1e3) << ','
        << format_double(p_transfer[i]) << '\n';
}

void write_pulse_csv(std::ostream& out, const PulseProgram& pulse,
                     const OutputMeta& meta) {
  write_meta_header(out, meta);
  out << "t_start_us,duration_us,rabi_khz,detuning_khz\n";
  double t_start = 0.0;
  for (const auto& seg : pulse.samples) {
    out << format_double(t_start * 1e6) << ','
        << format_double(seg.duration * 1e6) << ','
        << format_double(hz_from_angular(seg.rabi_amplitude) / 1e3) << ','
        << format_double(hz_from_angular(seg.detuning) / 1e3) << '\n';
    t_start += seg.duration;
  }
}

void write_trace_csv(std::ostream& out, const RabiTrace& trace,
                     const OutputMeta& meta) {
  write_meta_header(out, meta);
  out << "duration_us,p_excited,std_err,n_shots\n";
  for (const auto& pt : trace.points)
    out << format_double(pt.duration * 1e6) << ','
        << format_double(pt.p_excited) << ',' << format_double(pt.std_err)
        << ',' << pt.n_shots << '\n';
}

void write_thermometry_json(std::ostream& out, const ThermometryResult& result,
                            const OutputMeta& meta) {
  dump_json(out,
            json{{"meta", meta_json(meta)},
                 {"tau_max_us", result.tau_max * 1e6},
                 {"tau_max_err_us", result.tau_max_err * 1e6},
                 {"omega0_khz", hz_from_angular(result.omega0) / 1e3},
                 {"omega0_err_khz", hz_from_angular(result.omega0_err) / 1e3},
                 {"b", result.b},
                 {"b_err", result.b_err},
                 {"temperature_over_td", result.temperature_over_td},
                 {"temperature_err_over_td", result.temperature_err_over_td},
                 {"sse", result.sse},
                 {"envelope_flat", result.envelope_flat},
                 {"mode", result.mode == FitMode::coupled ? "coupled" : "joint"},
                 {"calibration",
                  json{{"c", result.calibration_c},
                       {"doppler_temperature_mk",
                        result.doppler_temperature * 1e3}}}});
}

void write_map_csv(std::ostream& out, const RobustnessMap& map,
                   const OutputMeta& meta) {
  write_meta_header(out, meta);
  out << "# cells: log10(1 - p_excited)\n";
  out << "y_over_omega0cal";
  for (double d : map.delta_axis) out << ',' << format_double(hz_from_angular(d));
  out << '\n';
  out << "delta_over_reference";
  for (double d : map.delta_axis)
    out << ',' << format_double(d / map.delta_reference);
  out << '\n';
  for (std::size_t i = 0; i < map.y_axis.size(); ++i) {
    out << format_double(map.y_axis[i]);
    for (double v : map.values[i]) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_map_json(std::ostream& out, const RobustnessMap& map,
                    const OutputMeta& meta) {
  dump_json(
      out,
      json{{"meta", meta_json(meta)},
           {"pulse",
            json{{"omega0_cal_khz", hz_from_angular(map.pulse.omega0_cal) / 1e3},
                 {"tau_sigma_us", map.pulse.tau_sigma * 1e6},
                 {"chirp_range_khz", map.pulse.chirp_range_hz / 1e3},
                 {"n_samples", map.pulse.n_samples}}},
           {"omega0_khz", hz_from_angular(map.omega0) / 1e3},
           {"b", map.b},
           {"dx", map.dx},
           {"delta_reference_hz", hz_from_angular(map.delta_reference)},
           {"y", json{{"min", map.y_axis.front()},
                      {"max", map.y_axis.back()},
                      {"n", map.y_axis.size()}}},
           {"delta_hz", json{{"min", hz_from_angular(map.delta_axis.front())},
                             {"max", hz_from_angular(map.delta_axis.back())},
                             {"n", map.delta_axis.size()}}},
           {"cells", "log10(1 - p_excited)"}});
}

RabiTrace read_trace_csv(std::istream& in, std::string_view source) {
  RabiTrace trace;
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto fields = split_fields(view);
    if (n_columns == 0) {
      if (fields.size() < 2 || fields.size() > 4 || fields[0] != "duration_us" ||
          fields[1] != "p_excited" ||
          (fields.size() > 2 && fields[2] != "std_err") ||
          (fields.size() > 3 && fields[3] != "n_shots"))
        fail_line(source, line_no,
                  "expected header duration_us,p_excited[,std_err[,n_shots]]");
      n_columns = fields.size();
      continue;
    }
    if (fields.size() != n_columns)
      fail_line(source, line_no,
                "expected " + std::to_string(n_columns) + " fields, got " +
                    std::to_string(fields.size()));
    TracePoint pt;
    const double duration_us = parse_double(fields[0], source, line_no);
    if (duration_us <= 0.0) fail_line(source, line_no, "duration_us must be > 0");
    pt.duration = duration_us * 1e-6;
    pt.p_excited = parse_double(fields[1], source, line_no);
    if (pt.p_excited < 0.0 || pt.p_excited > 1.0)
      fail_line(source, line_no, "p_excited outside [0, 1]");
    if (n_columns > 3) {
      pt.n_shots = parse_int(fields[3], source, line_no);
      if (pt.n_shots < 1) fail_line(source, line_no, "n_shots must be >= 1");
    }
    if (n_columns > 2) {
      pt.std_err = parse_double(fields[2], source, line_no);
      if (pt.std_err < 0.0) fail_line(source, line_no, "std_err negative");
    } else {
      const double p = std::clamp(pt.p_excited, 0.02, 0.98);
      pt.std_err = std::sqrt(p * (1.0 - p) / pt.n_shots);
    }
    trace.points.push_back(pt);
  }
  if (n_columns == 0)
    throw config_error(std::string(source) + ": no header row found");
  return trace;
}

}  // namespace thermalrabi
