#include "cipd/io.hpp"

#include "cipd/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace cipd {

namespace fs = std::filesystem;
using nlohmann::json;

void atomic_write(const fs::path& path, const std::string& contents) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed: " + path.string() + ": " + ec.message());
}

namespace {

void append_double(std::string& out, double x) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", x);
  out.append(buf, static_cast<std::size_t>(len));
}

json schedule_to_json(const PulseSchedule& s) {
  return {{"mean_photons", s.mean_photons},
          {"pulse_period_s", s.pulse_period},
          {"pulse_width_s", s.pulse_width},
          {"n_pulses", s.n_pulses},
          {"pulse_start_offset_s", s.pulse_start_offset}};
}

PulseSchedule schedule_from_json(const json& j) {
  PulseSchedule s;
  s.mean_photons = j.at("mean_photons").get<double>();
  s.pulse_period = j.at("pulse_period_s").get<double>();
  s.pulse_width = j.at("pulse_width_s").get<double>();
  s.n_pulses = j.at("n_pulses").get<long>();
  s.pulse_start_offset = j.at("pulse_start_offset_s").get<double>();
  return s;
}

}  // namespace

std::string trace_to_csv(const Trace& trace) {
  std::string out = "time_s,volts\n";
  out.reserve(out.size() + trace.samples.size() * 44);
  const double dt = 1.0 / trace.sample_rate;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    append_double(out, static_cast<double>(i) * dt);
    out.push_back(',');
    append_double(out, trace.samples[i]);
    out.push_back('\n');
  }
  return out;
}

Trace trace_from_csv(const std::string& csv, double sample_rate_hint) {
  Trace trace;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line.rfind("time_s,volts", 0) != 0)
    throw ConfigError("trace CSV: expected header 'time_s,volts'");
  double t0 = 0.0, t1 = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ConfigError("trace CSV: missing volts column in row '" + line + "'");
    double t = 0.0, v = 0.0;
    const char* b = line.data();
    auto r1 = std::from_chars(b, b + comma, t);
    auto r2 = std::from_chars(b + comma + 1, b + line.size(), v);
    if (r1.ec != std::errc{} || r2.ec != std::errc{})
      throw ConfigError("trace CSV: malformed row '" + line + "'");
    if (trace.samples.empty()) t0 = t;
    if (trace.samples.size() == 1) t1 = t;
    trace.samples.push_back(v);
  }
  if (sample_rate_hint > 0.0)
    trace.sample_rate = sample_rate_hint;
  else if (trace.samples.size() >= 2 && t1 > t0)
    trace.sample_rate = 1.0 / (t1 - t0);
  else
    throw ConfigError("trace CSV: cannot infer sample rate");
  return trace;
}

std::string trace_to_json(const Trace& trace) {
  json j;
  j["sample_rate_hz"] = trace.sample_rate;
  j["seed"] = trace.seed;
  j["reset_indices"] = trace.reset_indices;
  j["schedule"] = schedule_to_json(trace.schedule);
  j["pulse_carriers"] = trace.pulse_carriers;
  j["dark_carrier_count"] = trace.dark_carrier_count;
  j["samples"] = trace.samples;
  return j.dump();
}

Trace trace_from_json(const std::string& json_text) {
  const json j = json::parse(json_text);
  Trace trace;
  trace.sample_rate = j.at("sample_rate_hz").get<double>();
  trace.seed = j.at("seed").get<std::uint64_t>();
  trace.reset_indices = j.at("reset_indices").get<std::vector<std::size_t>>();
  trace.schedule = schedule_from_json(j.at("schedule"));
  trace.pulse_carriers = j.at("pulse_carriers").get<std::vector<long>>();
  trace.dark_carrier_count = j.at("dark_carrier_count").get<std::size_t>();
  trace.samples = j.at("samples").get<std::vector<double>>();
  trace.validate();
  return trace;
}

std::string readout_to_csv(const ReadoutResult& result) {
  std::string out = "window_index,raw_electrons,count,flag\n";
  for (std::size_t i = 0; i < result.raw_electrons.size(); ++i) {
    out += std::to_string(i);
    out.push_back(',');
    append_double(out, result.raw_electrons[i]);
    out.push_back(',');
    out += std::to_string(i < result.counts.size() ? result.counts[i] : 0L);
    out.push_back(',');
    out += std::to_string(static_cast<int>(i < result.flags.size() ? result.flags[i] : 0));
    out.push_back('\n');
  }
  return out;
}

std::string readout_to_json(const ReadoutResult& result) {
  json j;
  j["raw_electrons"] = result.raw_electrons;
  j["counts"] = result.counts;
  j["flags"] = result.flags;
  return j.dump();
}

std::string fit_report_to_json(const PoissonFit& fit, const Histogram& hist) {
  json h = json::object();
  for (const auto& [k, c] : hist.counts_by_k) h[std::to_string(k)] = c;
  json j;
  j["lambda_hat"] = fit.lambda_hat;
  j["std_error"] = fit.std_error;
  j["chi_square"] = fit.chi_square;
  j["dof"] = fit.dof;
  j["p_value"] = fit.p_value;
  j["gof_valid"] = fit.gof_valid;
  j["n_samples"] = fit.n_samples;
  j["histogram"] = h;
  return j.dump(2);
}

std::string histogram_to_csv(const Histogram& hist) {
  std::string out = "k,occurrences\n";
  for (const auto& [k, c] : hist.counts_by_k)
    out += std::to_string(k) + "," + std::to_string(c) + "\n";
  return out;
}

Trace load_trace(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.extension() == ".json") return trace_from_json(text);
  return trace_from_csv(text);
}

}  // namespace cipd
