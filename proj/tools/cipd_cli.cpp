// cipd: charge-integration photon detector simulator and analyzer.
//
// Subcommands:
//   noise-budget  analytic CDS noise, signal per carrier and resolution
//   simulate      synthesize a staircase trace (CSV + JSON + manifest)
//   analyze       CDS readout, histogram, Poisson fit, QE / dark rate
//   sweep         resolution_electrons over a one-parameter grid
//
// Exit codes: 0 success, 2 config error, 3 I/O error, 4 non-convergence.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cipd/config.hpp"
#include "cipd/ensemble.hpp"
#include "cipd/errors.hpp"
#include "cipd/io.hpp"
#include "cipd/noise_model.hpp"
#include "cipd/readout.hpp"
#include "cipd/signal_sim.hpp"
#include "cipd/statistics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitConvergence = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  long long seed = -1;
  std::string format = "both";  // csv, json, both
};

cipd::RunConfig resolve_config(const CommonOpts& opts) {
  cipd::RunConfig config =
      opts.config_path.empty() ? cipd::RunConfig{} : cipd::load_config(opts.config_path);
  if (opts.seed >= 0) {
    config.seed = static_cast<std::uint64_t>(opts.seed);
    config.seed_set = true;
  }
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  config.validate();
  return config;
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw cipd::IoError("cannot create output directory: " + dir.string());
}

void write_manifest(const cipd::RunConfig& config, const std::vector<std::string>& files) {
  json m;
  m["config"] = json::parse(cipd::config_to_json(config));
  m["config_hash"] = cipd::config_hash(config);
  m["seed"] = config.seed;
  m["files"] = files;
  cipd::atomic_write(config.output_dir / "manifest.json", m.dump(2));
}

int cmd_noise_budget(const CommonOpts& opts) {
  const cipd::RunConfig config = resolve_config(opts);
  const auto quad = cipd::cds_noise_quadrature(config.spectrum, config.cds);
  const double v_carrier = cipd::signal_per_carrier(config.detector);
  const double resolution = quad.value / v_carrier;

  json report;
  report["cds_noise_voltage_v"] = quad.value;
  report["signal_per_carrier_v"] = v_carrier;
  report["resolution_electrons"] = resolution;
  report["quadrature_converged"] = quad.converged;
  report["quadrature_tail_bound_v"] = quad.tail_bound;
  report["config"] = json::parse(cipd::config_to_json(config));
  const std::string text = report.dump(2);
  std::cout << text << "\n";

  ensure_out_dir(config.output_dir);
  cipd::atomic_write(config.output_dir / "noise_budget.json", text);
  if (!quad.converged) {
    std::cerr << "noise-budget: quadrature did not converge; value is a partial estimate\n";
    return kExitConvergence;
  }
  return 0;
}

int cmd_simulate(const CommonOpts& opts) {
  const cipd::RunConfig config = resolve_config(opts);
  const cipd::Trace trace =
      cipd::synthesize_trace(config.detector, config.schedule, config.spectrum, config.rts,
                             config.sample_rate, config.reset_period, config.seed);
  ensure_out_dir(config.output_dir);
  std::vector<std::string> files;
  if (opts.format == "csv" || opts.format == "both") {
    cipd::atomic_write(config.output_dir / "trace.csv", cipd::trace_to_csv(trace));
    files.push_back("trace.csv");
  }
  if (opts.format == "json" || opts.format == "both") {
    cipd::atomic_write(config.output_dir / "trace.json", cipd::trace_to_json(trace));
    files.push_back("trace.json");
  }
  write_manifest(config, files);
  std::cout << "simulate: wrote " << trace.samples.size() << " samples, "
            << trace.reset_indices.size() << " resets, "
            << trace.pulse_carriers.size() << " pulses to " << config.output_dir.string()
            << "\n";
  return 0;
}

int cmd_analyze(const CommonOpts& opts, const std::string& trace_path) {
  const cipd::RunConfig config = resolve_config(opts);
  cipd::Trace trace = cipd::load_trace(trace_path);
  if (trace.sample_rate <= 0.0) trace.sample_rate = config.sample_rate;
  if (trace.schedule.n_pulses == 0 && config.schedule.n_pulses > 0)
    trace.schedule = config.schedule;

  const auto windows = cipd::make_pulse_windows(trace, config.cds);
  const cipd::ReadoutResult result =
      cipd::read_counts(trace, config.detector, config.cds, windows);
  const cipd::Histogram hist = cipd::build_histogram(result.counts);
  const cipd::PoissonFit fit = cipd::fit_poisson(hist);

  json report = json::parse(cipd::fit_report_to_json(fit, hist));
  report["n_windows"] = windows.size();
  if (trace.schedule.mean_photons > 0.0) {
    const auto qe =
        cipd::estimate_qe(fit.lambda_hat, fit.std_error, trace.schedule.mean_photons);
    report["qe_estimate"] = qe.value;
    report["qe_std_error"] = qe.std_error;
  }
  const auto dark =
      cipd::estimate_dark_rate(result.counts, trace.schedule.pulse_period);
  report["count_rate_per_s"] = dark.value;
  report["count_rate_std_error"] = dark.std_error;

  const std::string text = report.dump(2);
  std::cout << text << "\n";

  ensure_out_dir(config.output_dir);
  cipd::atomic_write(config.output_dir / "fit.json", text);
  cipd::atomic_write(config.output_dir / "histogram.csv", cipd::histogram_to_csv(hist));
  if (opts.format == "csv" || opts.format == "both")
    cipd::atomic_write(config.output_dir / "readout.csv", cipd::readout_to_csv(result));
  if (opts.format == "json" || opts.format == "both")
    cipd::atomic_write(config.output_dir / "readout.json", cipd::readout_to_json(result));
  return 0;
}

int cmd_sweep(const CommonOpts& opts, const std::string& param,
              const std::vector<double>& values) {
  const cipd::RunConfig config = resolve_config(opts);
  const std::vector<double> res = cipd::sweep_resolution(config, param, values);

  std::string csv = param + ",resolution_electrons\n";
  char buf[64];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", values[i], res[i]);
    csv += buf;
  }
  std::cout << csv;
  ensure_out_dir(config.output_dir);
  cipd::atomic_write(config.output_dir / "sweep.csv", csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charge-integration photon detector simulator"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string trace_path;
  std::string sweep_param;
  std::vector<double> sweep_values;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file");
    sub->add_option("--seed", opts.seed, "RNG seed (overrides config)");
    sub->add_option("--out", opts.out_dir, "output directory (overrides config)");
    sub->add_option("--format", opts.format, "csv, json or both")
        ->check(CLI::IsMember({"csv", "json", "both"}));
  };

  CLI::App* budget = app.add_subcommand("noise-budget", "analytic CDS noise budget");
  add_common(budget);
  CLI::App* simulate = app.add_subcommand("simulate", "synthesize a staircase trace");
  add_common(simulate);
  CLI::App* analyze = app.add_subcommand("analyze", "readout + Poisson fit of a trace");
  add_common(analyze);
  analyze->add_option("--trace", trace_path, "trace file (.json or .csv)")->required();
  CLI::App* sweep = app.add_subcommand("sweep", "resolution over a parameter grid");
  add_common(sweep);
  sweep->add_option("--param", sweep_param, "parameter to vary")->required();
  sweep->add_option("--values", sweep_values, "grid values")->required()->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (budget->parsed()) return cmd_noise_budget(opts);
    if (simulate->parsed()) return cmd_simulate(opts);
    if (analyze->parsed()) return cmd_analyze(opts, trace_path);
    if (sweep->parsed()) return cmd_sweep(opts, sweep_param, sweep_values);
  } catch (const cipd::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const cipd::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  } catch (const cipd::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return 0;
}
