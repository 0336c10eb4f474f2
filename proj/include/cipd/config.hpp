// Run configuration: one JSON document with flat sections mirroring the
// domain types. All physical quantities are SI and key names carry unit
// suffixes.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "cipd/noise_model.hpp"
#include "cipd/signal_sim.hpp"

namespace cipd {

struct RunConfig {
  DetectorParams detector;
  NoiseSpectrum spectrum;
  CdsConfig cds;
  PulseSchedule schedule;
  RtsParams rts;
  double sample_rate = 1000.0;  // Hz
  double reset_period = std::numeric_limits<double>::infinity();  // s; inf = never
  std::uint64_t seed = 0;
  bool seed_set = false;  // explicit seed is mandatory
  std::filesystem::path output_dir = ".";

  void validate() const;
};

// Parses the config document; unknown keys are rejected, a missing seed is
// an error unless one is supplied on the command line afterwards.
// Throws std::runtime_error with a diagnostic naming the offending key.
RunConfig parse_config(const std::string& json_text);

RunConfig load_config(const std::filesystem::path& path);

// Canonical serialization (sorted keys, 17 significant digits).
std::string config_to_json(const RunConfig& config);

// FNV-1a 64 of the canonical serialization; stable across runs.
std::uint64_t config_hash(const RunConfig& config);

}  // namespace cipd
