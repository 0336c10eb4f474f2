// End-to-end exercise of the cipd binary: exit codes, file outputs,
// reproducibility. The binary path comes in via CIPD_BIN.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(CIPD_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("cipd_cli_" + std::to_string(std::rand()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_CASE("noise-budget: reference defaults report ~0.39 e resolution") {
  TempDir dir;
  write_file(dir.path / "c.json", R"({"seed": 1})");
  CHECK(run("noise-budget --config " + (dir.path / "c.json").string() + " --out " +
            (dir.path / "out").string()) == 0);
  const json report = json::parse(slurp(dir.path / "out" / "noise_budget.json"));
  CHECK(report["resolution_electrons"].get<double>() == doctest::Approx(0.3868).epsilon(0.01));
  CHECK(report["cds_noise_voltage_v"].get<double>() == doctest::Approx(7.86e-7).epsilon(0.01));
  CHECK(report["quadrature_converged"].get<bool>());
}

TEST_CASE("noise-budget: zero spectrum gives zero resolution") {
  TempDir dir;
  write_file(dir.path / "c.json",
             R"({"seed": 1, "spectrum": {"amplitude_1hz_v_per_rthz": 0.0}})");
  CHECK(run("noise-budget --config " + (dir.path / "c.json").string() + " --out " +
            (dir.path / "out").string()) == 0);
  const json report = json::parse(slurp(dir.path / "out" / "noise_budget.json"));
  CHECK(report["resolution_electrons"].get<double>() == 0.0);
}

TEST_CASE("malformed or invalid configs exit with code 2") {
  TempDir dir;
  write_file(dir.path / "bad.json", "{not json");
  CHECK(run("noise-budget --config " + (dir.path / "bad.json").string()) == 2);
  write_file(dir.path / "badkey.json", R"({"seed":1,"detector":{"wrong":1}})");
  CHECK(run("noise-budget --config " + (dir.path / "badkey.json").string()) == 2);
  write_file(dir.path / "noseed.json", R"({})");
  CHECK(run("noise-budget --config " + (dir.path / "noseed.json").string()) == 2);
  write_file(dir.path / "badval.json", R"({"seed":1,"detector":{"gm":0.0}})");
  CHECK(run("noise-budget --config " + (dir.path / "badval.json").string()) == 2);
}

TEST_CASE("unwritable output directory exits with code 3") {
  TempDir dir;
  write_file(dir.path / "c.json", R"({"seed": 1})");
  write_file(dir.path / "blocker", "");
  CHECK(run("noise-budget --config " + (dir.path / "c.json").string() + " --out " +
            (dir.path / "blocker" / "sub").string()) == 3);
}

TEST_CASE("simulate is reproducible and analyze closes the loop") {
  TempDir dir;
  write_file(dir.path / "c.json", R"({
    "seed": 42,
    "detector": {"dark_rate_hz": 0.0},
    "spectrum": {"amplitude_1hz_v_per_rthz": 0.0},
    "schedule": {"mean_photons": 6.97, "n_pulses": 20}
  })");
  const std::string cfg = " --config " + (dir.path / "c.json").string();
  CHECK(run("simulate" + cfg + " --out " + (dir.path / "a").string()) == 0);
  CHECK(run("simulate" + cfg + " --out " + (dir.path / "b").string()) == 0);
  CHECK(slurp(dir.path / "a" / "trace.csv") == slurp(dir.path / "b" / "trace.csv"));
  CHECK(slurp(dir.path / "a" / "trace.json") == slurp(dir.path / "b" / "trace.json"));
  // Manifests agree once the (intentionally different) output paths are
  // stripped; the config hash ignores the output directory by design.
  json ma = json::parse(slurp(dir.path / "a" / "manifest.json"));
  json mb = json::parse(slurp(dir.path / "b" / "manifest.json"));
  CHECK(ma["config_hash"] == mb["config_hash"]);
  ma["config"].erase("output_dir");
  mb["config"].erase("output_dir");
  CHECK(ma == mb);

  // Noise off: analyzed counts equal the injected carriers exactly.
  CHECK(run("analyze" + cfg + " --trace " + (dir.path / "a" / "trace.json").string() +
            " --out " + (dir.path / "fit").string()) == 0);
  const json fit = json::parse(slurp(dir.path / "fit" / "fit.json"));
  const json trace = json::parse(slurp(dir.path / "a" / "trace.json"));
  CHECK(fit["n_windows"].get<int>() == 20);
  double mean = 0.0;
  for (const auto& c : trace["pulse_carriers"]) mean += c.get<double>();
  mean /= 20.0;
  CHECK(fit["lambda_hat"].get<double>() == doctest::Approx(mean).epsilon(1e-9));
  CHECK(fit.contains("qe_estimate"));
}

TEST_CASE("simulate with n_pulses=0 produces pure noise") {
  TempDir dir;
  write_file(dir.path / "c.json", R"({
    "seed": 9,
    "detector": {"dark_rate_hz": 0.0},
    "schedule": {"mean_photons": 0.0, "n_pulses": 0}
  })");
  CHECK(run("simulate --config " + (dir.path / "c.json").string() + " --out " +
            (dir.path / "out").string()) == 0);
  const json trace = json::parse(slurp(dir.path / "out" / "trace.json"));
  CHECK(trace["pulse_carriers"].empty());
  CHECK(trace["samples"].size() == 1000);
}

TEST_CASE("analyze rejects malformed trace files with code 2") {
  TempDir dir;
  write_file(dir.path / "c.json", R"({"seed": 1})");
  write_file(dir.path / "bad.csv", "volts,time_s\n0,0\n");
  CHECK(run("analyze --config " + (dir.path / "c.json").string() + " --trace " +
            (dir.path / "bad.csv").string()) == 2);
  CHECK(run("analyze --config " + (dir.path / "c.json").string() +
            " --trace /no/such/file.csv") == 3);
}

TEST_CASE("sweep: single-point grid matches noise-budget; bad param exits 2") {
  TempDir dir;
  write_file(dir.path / "c.json", R"({"seed": 1})");
  const std::string cfg = " --config " + (dir.path / "c.json").string();
  CHECK(run("sweep" + cfg + " --param amplitude_1hz --values 470e-9 --out " +
            (dir.path / "s").string()) == 0);
  const std::string csv = slurp(dir.path / "s" / "sweep.csv");
  CHECK(csv.find("amplitude_1hz,resolution_electrons") == 0);
  CHECK(csv.find("0.38") != std::string::npos);

  CHECK(run("sweep" + cfg + " --param nope --values 1,2") == 2);
}
