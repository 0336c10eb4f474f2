// Ensemble kernels: the embarrassingly parallel loops of the artifact
// (many-seed simulation/readout, periodogram averaging, parameter sweeps).
// Each kernel has an OpenMP implementation and a serial reference; both
// produce bitwise-identical results because every loop iteration is a pure
// function of its own sub-seed and results are combined in index order.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cipd/config.hpp"
#include "cipd/readout.hpp"
#include "cipd/statistics.hpp"

namespace cipd {

// One-sided PSD estimate [V^2/Hz] averaged over n_realizations independent
// noise syntheses of n_samples points; entry k is frequency k*fs/n, DC is 0.
std::vector<double> average_periodogram(const NoiseSpectrum& spec, double sample_rate,
                                        std::size_t n_samples, int n_realizations,
                                        std::uint64_t base_seed);
std::vector<double> average_periodogram_serial(const NoiseSpectrum& spec, double sample_rate,
                                               std::size_t n_samples, int n_realizations,
                                               std::uint64_t base_seed);

// Full simulate -> CDS readout -> Poisson fit for n_seeds independent seeds
// derived from config.seed.
std::vector<PoissonFit> simulate_fit_ensemble(const RunConfig& config, int n_seeds);
std::vector<PoissonFit> simulate_fit_ensemble_serial(const RunConfig& config, int n_seeds);

// Scalar fields a sweep may vary. Throws on unknown names.
void apply_sweep_value(RunConfig& config, const std::string& param, double value);
std::vector<std::string> sweep_parameter_names();

// resolution_electrons at each grid value of one swept parameter.
std::vector<double> sweep_resolution(const RunConfig& base, const std::string& param,
                                     const std::vector<double>& values);
std::vector<double> sweep_resolution_serial(const RunConfig& base, const std::string& param,
                                            const std::vector<double>& values);

// Least-squares slope of log10(psd) vs log10(f) over [f_lo, f_hi].
double periodogram_slope(const std::vector<double>& psd, double sample_rate,
                         std::size_t n_samples, double f_lo, double f_hi);

}  // namespace cipd
