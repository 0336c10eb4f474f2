#include "cipd/config.hpp"

#include "cipd/errors.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cipd {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* section,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok)
      throw ConfigError(std::string("config: unknown key '") + key + "' in " + section);
  }
}

double get_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? j.at(key).get<double>() : fallback;
}

}  // namespace

void RunConfig::validate() const {
  detector.validate();
  spectrum.validate();
  cds.validate();
  schedule.validate();
  rts.validate();
  if (!(sample_rate > 0.0)) throw std::invalid_argument("RunConfig: sample_rate must be > 0");
  if (!(reset_period > 0.0)) throw std::invalid_argument("RunConfig: reset_period must be > 0");
  if (!seed_set) throw std::invalid_argument("RunConfig: an explicit seed is required");
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  check_keys(j, "top level",
             {"detector", "spectrum", "cds", "schedule", "rts", "sample_rate_hz",
              "reset_period_s", "seed", "output_dir"});

  RunConfig c;
  if (j.contains("detector")) {
    const json& d = j["detector"];
    check_keys(d, "detector", {"gm", "c_input_farads", "quantum_efficiency", "dark_rate_hz"});
    c.detector.gm = get_or(d, "gm", c.detector.gm);
    c.detector.c_input = get_or(d, "c_input_farads", c.detector.c_input);
    c.detector.quantum_efficiency = get_or(d, "quantum_efficiency", c.detector.quantum_efficiency);
    c.detector.dark_rate = get_or(d, "dark_rate_hz", c.detector.dark_rate);
  }
  if (j.contains("spectrum")) {
    const json& s = j["spectrum"];
    check_keys(s, "spectrum",
               {"amplitude_1hz_v_per_rthz", "flicker_exponent", "white_floor_v_per_rthz"});
    c.spectrum.amplitude_1hz = get_or(s, "amplitude_1hz_v_per_rthz", c.spectrum.amplitude_1hz);
    c.spectrum.flicker_exponent = get_or(s, "flicker_exponent", c.spectrum.flicker_exponent);
    c.spectrum.white_floor = get_or(s, "white_floor_v_per_rthz", c.spectrum.white_floor);
  }
  if (j.contains("cds")) {
    const json& s = j["cds"];
    check_keys(s, "cds", {"t_integration_s", "pulse_width_s", "f_cutoff_hz", "t_average_s"});
    c.cds.t_integration = get_or(s, "t_integration_s", c.cds.t_integration);
    c.cds.pulse_width = get_or(s, "pulse_width_s", c.cds.pulse_width);
    c.cds.f_cutoff = get_or(s, "f_cutoff_hz", c.cds.f_cutoff);
    c.cds.t_average = get_or(s, "t_average_s", c.cds.t_average);
  }
  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    check_keys(s, "schedule",
               {"mean_photons", "pulse_period_s", "pulse_width_s", "n_pulses",
                "pulse_start_offset_s"});
    c.schedule.mean_photons = get_or(s, "mean_photons", c.schedule.mean_photons);
    c.schedule.pulse_period = get_or(s, "pulse_period_s", c.schedule.pulse_period);
    c.schedule.pulse_width = get_or(s, "pulse_width_s", c.schedule.pulse_width);
    if (s.contains("n_pulses")) c.schedule.n_pulses = s.at("n_pulses").get<long>();
    c.schedule.pulse_start_offset =
        get_or(s, "pulse_start_offset_s", c.schedule.pulse_start_offset);
  }
  if (j.contains("rts")) {
    const json& s = j["rts"];
    check_keys(s, "rts", {"enabled", "amplitude_v", "rate_up_hz", "rate_down_hz"});
    if (s.contains("enabled")) c.rts.enabled = s.at("enabled").get<bool>();
    c.rts.amplitude = get_or(s, "amplitude_v", c.rts.amplitude);
    c.rts.rate_up = get_or(s, "rate_up_hz", c.rts.rate_up);
    c.rts.rate_down = get_or(s, "rate_down_hz", c.rts.rate_down);
  }
  c.sample_rate = get_or(j, "sample_rate_hz", c.sample_rate);
  if (j.contains("reset_period_s")) {
    const json& r = j.at("reset_period_s");
    c.reset_period = r.is_string() ? std::numeric_limits<double>::infinity() : r.get<double>();
  }
  if (j.contains("seed")) {
    c.seed = j.at("seed").get<std::uint64_t>();
    c.seed_set = true;
  }
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["detector"] = {{"gm", c.detector.gm},
                   {"c_input_farads", c.detector.c_input},
                   {"quantum_efficiency", c.detector.quantum_efficiency},
                   {"dark_rate_hz", c.detector.dark_rate}};
  j["spectrum"] = {{"amplitude_1hz_v_per_rthz", c.spectrum.amplitude_1hz},
                   {"flicker_exponent", c.spectrum.flicker_exponent},
                   {"white_floor_v_per_rthz", c.spectrum.white_floor}};
  j["cds"] = {{"t_integration_s", c.cds.t_integration},
              {"pulse_width_s", c.cds.pulse_width},
              {"f_cutoff_hz", c.cds.f_cutoff},
              {"t_average_s", c.cds.t_average}};
  j["schedule"] = {{"mean_photons", c.schedule.mean_photons},
                   {"pulse_period_s", c.schedule.pulse_period},
                   {"pulse_width_s", c.schedule.pulse_width},
                   {"n_pulses", c.schedule.n_pulses},
                   {"pulse_start_offset_s", c.schedule.pulse_start_offset}};
  j["rts"] = {{"enabled", c.rts.enabled},
              {"amplitude_v", c.rts.amplitude},
              {"rate_up_hz", c.rts.rate_up},
              {"rate_down_hz", c.rts.rate_down}};
  j["sample_rate_hz"] = c.sample_rate;
  j["reset_period_s"] = std::isfinite(c.reset_period) ? json(c.reset_period) : json("inf");
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir.string();
  return j.dump(2);  // nlohmann keeps object keys sorted
}

std::uint64_t config_hash(const RunConfig& config) {
  // Hash the physics configuration only: the same run written to a
  // different output directory must keep the same identity.
  json j = json::parse(config_to_json(config));
  j.erase("output_dir");
  const std::string s = j.dump(2);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace cipd
