#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "thermalrabi/constants.hpp"
#include "thermalrabi/errors.hpp"
#include "thermalrabi/rabi_distribution.hpp"
#include "thermalrabi/robustness.hpp"
#include "thermalrabi/serialization.hpp"
#include "thermalrabi/thermometry.hpp"

namespace tr = thermalrabi;

TEST_CASE("fnv1a matches the published test vectors") {
  CHECK(tr::fnv1a_hash("") == UINT64_C(0xcbf29ce484222325));
  CHECK(tr::fnv1a_hash("a") == UINT64_C(0xaf63dc4c8601ec8c));
  CHECK(tr::fnv1a_hash("foobar") == UINT64_C(0x85944171f73967e8));
  CHECK(tr::hash_hex(UINT64_C(0xcbf29ce484222325)) == "cbf29ce484222325");
  CHECK(tr::hash_hex(0) == "0000000000000000");
}

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 500; ++i) {
    const double v = mant(rng) * std::pow(10.0, expo(rng));
    const std::string s = tr::format_double(v);
    double back = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(res.ec == std::errc());
    CHECK(back == v);
  }
  CHECK(tr::format_double(0.0) == "0");
  CHECK(tr::format_double(1.0) == "1");
  CHECK(tr::format_double(0.5) == "0.5");
}

TEST_CASE("trace csv writes and reads back exactly") {
  const tr::RabiTrace trace =
      tr::synthesize_trace(tr::two_pi * 104.9e3, 7.1e-4, 20.0e-6, 40, 200, 5);
  tr::OutputMeta meta;
  meta.config_hash = 0xabcdef;

  std::ostringstream out;
  tr::write_trace_csv(out, trace, meta);
  const std::string text = out.str();
  CHECK(text.find("# thermalrabi ") == 0);
  CHECK(text.find("duration_us,p_excited,std_err,n_shots") != std::string::npos);

  std::istringstream in(text);
  const tr::RabiTrace back = tr::read_trace_csv(in, "round trip");
  REQUIRE(back.points.size() == trace.points.size());
  for (std::size_t i = 0; i < trace.points.size(); ++i) {
    // The probability columns round-trip bit for bit; durations pass
    // through a us conversion and back, which costs at most one rounding.
    CHECK(back.points[i].duration ==
          doctest::Approx(trace.points[i].duration).epsilon(1e-14));
    CHECK(back.points[i].p_excited == trace.points[i].p_excited);
    CHECK(back.points[i].std_err == trace.points[i].std_err);
    CHECK(back.points[i].n_shots == trace.points[i].n_shots);
  }
}

TEST_CASE("read_trace_csv column defaults") {
  SUBCASE("two columns fill in shot noise at 200 shots") {
    std::istringstream in(
        "duration_us,p_excited\n"
        "1.0,0.25\n"
        "2.0,0.5\n");
    const auto trace = tr::read_trace_csv(in);
    REQUIRE(trace.points.size() == 2);
    CHECK(trace.points[0].duration == doctest::Approx(1.0e-6));
    CHECK(trace.points[0].n_shots == 200);
    CHECK(trace.points[0].std_err ==
          doctest::Approx(std::sqrt(0.25 * 0.75 / 200.0)));
    CHECK(trace.points[1].std_err ==
          doctest::Approx(std::sqrt(0.5 * 0.5 / 200.0)));
  }

  SUBCASE("three columns keep the written std_err") {
    std::istringstream in(
        "duration_us,p_excited,std_err\n"
        "1.0,0.25,0.01\n");
    const auto trace = tr::read_trace_csv(in);
    REQUIRE(trace.points.size() == 1);
    CHECK(trace.points[0].std_err == 0.01);
    CHECK(trace.points[0].n_shots == 200);
  }

  SUBCASE("four columns are taken verbatim") {
    std::istringstream in(
        "duration_us,p_excited,std_err,n_shots\n"
        "1.0,0.25,0.01,400\n");
    const auto trace = tr::read_trace_csv(in);
    REQUIRE(trace.points.size() == 1);
    CHECK(trace.points[0].n_shots == 400);
  }

  SUBCASE("comment and blank lines are skipped") {
    std::istringstream in(
        "# produced elsewhere\n"
        "\n"
        "duration_us,p_excited\n"
        "# mid-file note\n"
        "1.0,0.25\n");
    const auto trace = tr::read_trace_csv(in);
    CHECK(trace.points.size() == 1);
  }
}

TEST_CASE("read_trace_csv rejects malformed input") {
  SUBCASE("bad number names the line") {
    std::istringstream in(
        "duration_us,p_excited\n"
        "1.0,0.25\n"
        "2.0,zebra\n");
    CHECK_THROWS_WITH_AS(tr::read_trace_csv(in, "input.csv"),
                         doctest::Contains("input.csv: line 3"),
                         tr::config_error);
  }

  SUBCASE("wrong field count") {
    std::istringstream in(
        "duration_us,p_excited\n"
        "1.0\n");
    CHECK_THROWS_AS(tr::read_trace_csv(in), tr::config_error);
  }

  SUBCASE("unknown header") {
    std::istringstream in(
        "time,prob\n"
        "1.0,0.25\n");
    CHECK_THROWS_AS(tr::read_trace_csv(in), tr::config_error);
  }

  SUBCASE("probability out of range") {
    std::istringstream in(
        "duration_us,p_excited\n"
        "1.0,1.25\n");
    CHECK_THROWS_AS(tr::read_trace_csv(in), tr::config_error);
  }

  SUBCASE("non-positive duration") {
    std::istringstream in(
        "duration_us,p_excited\n"
        "0.0,0.25\n");
    CHECK_THROWS_AS(tr::read_trace_csv(in), tr::config_error);
  }

  SUBCASE("empty stream") {
    CHECK_THROWS_WITH_AS(
        [] {
          std::istringstream in("");
          return tr::read_trace_csv(in);
        }(),
        doctest::Contains("no header row"), tr::config_error);
  }
}

TEST_CASE("distribution csv layout") {
  const auto geometry = tr::reference_geometry();
  const auto modes = tr::make_mode_set(geometry, tr::reference_mode_frequencies(),
                                       2.0 * tr::reference_doppler_temperature);
  auto dist = tr::enumerate_distribution(modes, tr::two_pi * 104.9e3, 1.0e-3);
  dist = tr::compact_distribution(dist, 2000);

  tr::OutputMeta meta;
  std::ostringstream out;
  tr::write_exact_distribution_csv(out, dist, meta);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.find("# thermalrabi") == 0);
  std::getline(in, line);
  CHECK(line.find("# config ") == 0);
  std::getline(in, line);
  CHECK(line == "omega_hz,probability");
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == dist.points.size());
}

TEST_CASE("thermometry json carries the fit and calibration") {
  tr::ThermometryResult r;
  r.tau_max = 4.93e-6;
  r.omega0 = tr::two_pi * 105.0e3;
  r.b = 7.1e-4;
  r.b_err = 2.0e-5;
  r.temperature_over_td = 2.0;
  r.temperature_err_over_td = 0.11;
  r.sse = 812.5;
  r.mode = tr::FitMode::joint;
  r.calibration_c = 4.0e6;
  r.doppler_temperature = 0.55e-3;

  tr::OutputMeta meta;
  meta.config_hash = 42;
  std::ostringstream out;
  tr::write_thermometry_json(out, r, meta);

  const auto j = nlohmann::json::parse(out.str());
  CHECK(j.at("meta").at("config_hash") == tr::hash_hex(42));
  CHECK(j.at("meta").at("version") == tr::tool_version());
  CHECK(j.at("tau_max_us").get<double>() == doctest::Approx(4.93));
  CHECK(j.at("omega0_khz").get<double>() == doctest::Approx(105.0));
  CHECK(j.at("b").get<double>() == 7.1e-4);
  CHECK(j.at("temperature_over_td").get<double>() == 2.0);
  CHECK(j.at("mode") == "joint");
  CHECK(j.at("calibration").at("c").get<double>() == 4.0e6);
  CHECK(j.at("calibration").at("doppler_temperature_mk").get<double>() ==
        doctest::Approx(0.55));
  CHECK(j.at("envelope_flat") == false);
}

TEST_CASE("map csv layout") {
  tr::RobustnessMap map;
  map.y_axis = {0.9, 1.0, 1.1};
  map.delta_axis = {-tr::two_pi * 1.0e5, 0.0, tr::two_pi * 1.0e5};
  map.values = {{-1.0, -2.0, -1.5}, {-2.5, -4.0, -2.25}, {-1.25, -2.75, -1.75}};
  map.delta_reference = tr::two_pi * 1.0e5;
  map.b = 7.1e-4;
  map.omega0 = tr::two_pi * 104.9e3;

  tr::OutputMeta meta;
  std::ostringstream out;
  tr::write_map_csv(out, map, meta);

  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);  // version
  std::getline(in, line);  // config hash
  std::getline(in, line);
  CHECK(line.find("# cells: log10(1 - p_excited)") == 0);
  std::getline(in, line);
  CHECK(line.rfind("y_over_omega0cal,", 0) == 0);
  // Detuning axis in Hz on the first header row.
  CHECK(line.find(tr::format_double(tr::hz_from_angular(
            map.delta_axis.front()))) != std::string::npos);
  std::getline(in, line);
  CHECK(line.rfind("delta_over_reference,", 0) == 0);
  CHECK(line.find(tr::format_double(-1.0)) != std::string::npos);
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == map.y_axis.size());

  std::ostringstream sidecar;
  tr::write_map_json(sidecar, map, meta);
  const auto j = nlohmann::json::parse(sidecar.str());
  CHECK(j.at("b").get<double>() == 7.1e-4);
  CHECK(j.at("y").at("n").get<std::size_t>() == 3);
  CHECK(j.at("delta_hz").at("n").get<std::size_t>() == 3);
  CHECK(j.at("cells") == "log10(1 - p_excited)");
}

TEST_CASE("rabi compare csv pairs the two propagators") {
  tr::OutputMeta meta;
  std::ostringstream out;
  tr::write_rabi_compare_csv(out, {1.0e-6, 2.0e-6}, {0.1, 0.4}, {0.11, 0.39},
                             meta);
  const std::string text = out.str();
  CHECK(text.find("duration_us,p_exact,p_effective") != std::string::npos);
  CHECK(text.find("1,0.1,0.11") != std::string::npos);
  CHECK(text.find("2,0.4,0.39") != std::string::npos);
}

TEST_CASE("identical inputs serialize to identical bytes") {
  const tr::RabiTrace trace =
      tr::synthesize_trace(tr::two_pi * 104.9e3, 7.1e-4, 20.0e-6, 16, 200, 2);
  tr::OutputMeta meta;
  meta.config_hash = 7;
  std::ostringstream a, b;
  tr::write_trace_csv(a, trace, meta);
  tr::write_trace_csv(b, trace, meta);
  CHECK(a.str() == b.str());
  CHECK_FALSE(a.str().empty());
}
