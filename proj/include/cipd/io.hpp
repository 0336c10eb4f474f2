// File formats: trace CSV/JSON, readout CSV/JSON, fit-report JSON.
// All writes go through an atomic write-then-rename.
#pragma once

#include <filesystem>
#include <string>

#include "cipd/readout.hpp"
#include "cipd/signal_sim.hpp"
#include "cipd/statistics.hpp"

namespace cipd {

// Write-then-rename; throws std::runtime_error on I/O failure.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

// CSV trace: header "time_s,volts", one row per sample, 17 significant
// digits so the round trip is bit exact.
std::string trace_to_csv(const Trace& trace);
Trace trace_from_csv(const std::string& csv, double sample_rate_hint = 0.0);

// JSON trace: full metadata (schedule, seed, resets, ground truth) + samples.
std::string trace_to_json(const Trace& trace);
Trace trace_from_json(const std::string& json_text);

std::string readout_to_csv(const ReadoutResult& result);
std::string readout_to_json(const ReadoutResult& result);

// {lambda_hat, std_error, chi_square, dof, p_value, n_samples, histogram}
std::string fit_report_to_json(const PoissonFit& fit, const Histogram& hist);

std::string histogram_to_csv(const Histogram& hist);

Trace load_trace(const std::filesystem::path& path);

}  // namespace cipd
