#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "cipd/config.hpp"
#include "cipd/errors.hpp"
#include "cipd/io.hpp"
#include "cipd/signal_sim.hpp"

using namespace cipd;

namespace {

Trace small_noisy_trace() {
  DetectorParams det;
  PulseSchedule sched;
  sched.mean_photons = 4.0;
  sched.n_pulses = 3;
  NoiseSpectrum spec;
  return synthesize_trace(det, sched, spec, RtsParams{}, 1000.0, 2.0, 77);
}

}  // namespace

TEST_CASE("trace CSV round trip is bit exact") {
  Trace t = small_noisy_trace();
  Trace back = trace_from_csv(trace_to_csv(t), t.sample_rate);
  REQUIRE(back.samples.size() == t.samples.size());
  for (std::size_t i = 0; i < t.samples.size(); ++i) CHECK(back.samples[i] == t.samples[i]);
}

TEST_CASE("trace CSV schema errors carry a diagnostic") {
  CHECK_THROWS_AS(trace_from_csv("volts\n1.0\n"), ConfigError);
  CHECK_THROWS_AS(trace_from_csv("time_s,volts\n0.0\n"), ConfigError);
  CHECK_THROWS_AS(trace_from_csv("time_s,volts\n0.0,abc\n"), ConfigError);
}

TEST_CASE("trace JSON round trip preserves everything") {
  Trace t = small_noisy_trace();
  Trace back = trace_from_json(trace_to_json(t));
  CHECK(back.samples == t.samples);
  CHECK(back.reset_indices == t.reset_indices);
  CHECK(back.pulse_carriers == t.pulse_carriers);
  CHECK(back.dark_carrier_count == t.dark_carrier_count);
  CHECK(back.sample_rate == t.sample_rate);
  CHECK(back.seed == t.seed);
  CHECK(back.schedule.mean_photons == t.schedule.mean_photons);
  CHECK(back.schedule.n_pulses == t.schedule.n_pulses);
}

TEST_CASE("readout and histogram serialization") {
  ReadoutResult r;
  r.raw_electrons = {1.9, 0.1, -0.4};
  r.flags = {0, 0, 0};
  r.counts = quantize_counts(r.raw_electrons, &r.flags);
  const std::string csv = readout_to_csv(r);
  CHECK(csv.rfind("window_index,raw_electrons,count,flag\n", 0) == 0);
  CHECK(csv.find("\n0,") != std::string::npos);

  Histogram h = build_histogram({0, 1, 1, 4});
  const std::string hcsv = histogram_to_csv(h);
  CHECK(hcsv == "k,occurrences\n0,1\n1,2\n4,1\n");
}

TEST_CASE("atomic_write creates the file and fails loudly on bad paths") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cipd_io_test";
  fs::create_directories(dir);
  atomic_write(dir / "x.txt", "hello");
  std::ifstream in(dir / "x.txt");
  std::string s;
  std::getline(in, s);
  CHECK(s == "hello");
  CHECK_THROWS_AS(atomic_write(dir / "no_such_dir" / "x.txt", "hello"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("config parsing: defaults, overrides, units") {
  RunConfig c = parse_config(R"({"seed": 5})");
  CHECK(c.seed == 5);
  CHECK(c.seed_set);
  CHECK(c.detector.gm == doctest::Approx(0.85));
  CHECK(c.spectrum.amplitude_1hz == doctest::Approx(470e-9));
  CHECK(c.cds.t_integration == doctest::Approx(1.0));
  CHECK(c.sample_rate == doctest::Approx(1000.0));
  CHECK(std::isinf(c.reset_period));
  CHECK_NOTHROW(c.validate());

  RunConfig d = parse_config(R"({
    "seed": 1,
    "detector": {"quantum_efficiency": 0.5},
    "spectrum": {"white_floor_v_per_rthz": 1e-8},
    "schedule": {"mean_photons": 6.97, "n_pulses": 796},
    "reset_period_s": 100.0
  })");
  CHECK(d.detector.quantum_efficiency == doctest::Approx(0.5));
  CHECK(d.spectrum.white_floor == doctest::Approx(1e-8));
  CHECK(d.schedule.n_pulses == 796);
  CHECK(d.reset_period == doctest::Approx(100.0));
}

TEST_CASE("config parsing rejects unknown keys and bad JSON") {
  CHECK_THROWS_AS(parse_config("{nope"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed":1,"detector":{"gain":0.9}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed":1,"bogus_section":{}})"), ConfigError);
}

TEST_CASE("a missing seed fails validation") {
  RunConfig c = parse_config(R"({"sample_rate_hz": 500})");
  CHECK_FALSE(c.seed_set);
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("config hash is stable and sensitive") {
  RunConfig a = parse_config(R"({"seed": 5})");
  RunConfig b = parse_config(R"({"seed": 5})");
  CHECK(config_hash(a) == config_hash(b));
  RunConfig c = parse_config(R"({"seed": 6})");
  CHECK(config_hash(a) != config_hash(c));
  RunConfig d = parse_config(R"({"seed": 5, "detector": {"gm": 0.8}})");
  CHECK(config_hash(a) != config_hash(d));
}
