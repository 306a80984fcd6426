#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "thermalrabi/rabi_distribution.hpp"
#include "thermalrabi/robustness.hpp"
#include "thermalrabi/thermometry.hpp"

namespace thermalrabi {

std::string tool_version();

// 64-bit FNV-1a over raw bytes; stamps every output with the hash of the
// canonical config it came from.
std::uint64_t fnv1a_hash(std::string_view bytes);
std::string hash_hex(std::uint64_t hash);

// Shortest decimal form that round-trips (std::to_chars).
std::string format_double(double value);

struct OutputMeta {
  std::string version = tool_version();
  std::uint64_t config_hash = 0;
};

// Two comment lines before any header row: tool version, config hash.
void write_meta_header(std::ostream& out, const OutputMeta& meta);

void write_exact_distribution_csv(std::ostream& out,
                                  const DiscreteRabiDistribution& dist,
                                  const OutputMeta& meta);
void write_smoothed_distribution_csv(std::ostream& out,
                                     const SmoothedDistribution& smoothed,
                                     const OutputMeta& meta);
// Model density sampled on an explicit grid (rad/s), written in Hz units.
void write_model_distribution_csv(std::ostream& out,
                                  const EffectiveRabiDistribution& dist,
                                  const std::vector<double>& grid,
                                  const OutputMeta& meta);
void write_fit_summary_json(std::ostream& out, const BFitResult& fit,
                            double omega0, const OutputMeta& meta);
void write_calibration_json(std::ostream& out,
                            const TemperatureCalibration& calibration,
                            const OutputMeta& meta);
void write_rabi_compare_csv(std::ostream& out,
                            const std::vector<double>& durations,
                            const std::vector<double>& p_exact,
                            const std::vector<double>& p_effective,
                            const OutputMeta& meta);
void write_rap_scan_csv(std::ostream& out,
                        const std::vector<double>& omega0_cal,
                        const std::vector<double>& p_transfer,
                        const OutputMeta& meta);
void write_pulse_csv(std::ostream& out, const PulseProgram& pulse,
                     const OutputMeta& meta);
void write_trace_csv(std::ostream& out, const RabiTrace& trace,
                     const OutputMeta& meta);
void write_thermometry_json(std::ostream& out, const ThermometryResult& result,
                            const OutputMeta& meta);
// Matrix layout: two header rows carry the detuning axis (Hz, then units
// of delta_reference); data rows start with their y value.
void write_map_csv(std::ostream& out, const RobustnessMap& map,
                   const OutputMeta& meta);
// Sidecar with everything needed to regenerate the map bit for bit.
void write_map_json(std::ostream& out, const RobustnessMap& map,
                    const OutputMeta& meta);

// Columns duration_us,p_excited[,std_err[,n_shots]]; '#' lines skipped.
// Missing columns default to 200 shots and the binomial standard error.
// Malformed content raises config_error naming source and line number.
RabiTrace read_trace_csv(std::istream& in,
                         std::string_view source = "trace csv");

}  // namespace thermalrabi
