#include "cipd/ensemble.hpp"

#include <fftw3.h>
#include <omp.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

#include "cipd/rng.hpp"
#include "cipd/signal_sim.hpp"

namespace cipd {

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// One-sided periodogram [V^2/Hz] of a real sequence.
std::vector<double> periodogram(const std::vector<double>& x, double fs) {
  const std::size_t n = x.size();
  std::vector<double> in(x);
  std::vector<fftw_complex> spec(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), spec.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> psd(n / 2 + 1, 0.0);
  const double scale = 2.0 / (fs * static_cast<double>(n));
  for (std::size_t k = 1; k < psd.size(); ++k)
    psd[k] = scale * (spec[k][0] * spec[k][0] + spec[k][1] * spec[k][1]);
  return psd;
}

template <bool Parallel>
std::vector<double> average_periodogram_impl(const NoiseSpectrum& spec, double fs,
                                             std::size_t n, int n_real,
                                             std::uint64_t base_seed) {
  if (n_real <= 0) throw std::invalid_argument("average_periodogram: n_realizations must be > 0");
  std::vector<std::vector<double>> per(static_cast<std::size_t>(n_real));
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (int i = 0; i < n_real; ++i) {
    const auto noise = synthesize_flicker_noise(spec, fs, n, split_seed(base_seed, i));
    per[static_cast<std::size_t>(i)] = periodogram(noise, fs);
  }
  std::vector<double> avg(n / 2 + 1, 0.0);
  for (const auto& p : per)  // fixed order so both paths agree bitwise
    for (std::size_t k = 0; k < avg.size(); ++k) avg[k] += p[k];
  for (auto& v : avg) v /= static_cast<double>(n_real);
  return avg;
}

PoissonFit one_simulate_fit(const RunConfig& config, std::uint64_t seed) {
  const Trace trace = synthesize_trace(config.detector, config.schedule, config.spectrum,
                                       config.rts, config.sample_rate, config.reset_period,
                                       seed);
  const auto windows = make_pulse_windows(trace, config.cds);
  const ReadoutResult result = read_counts(trace, config.detector, config.cds, windows);
  return fit_poisson(build_histogram(result.counts));
}

template <bool Parallel>
std::vector<PoissonFit> simulate_fit_ensemble_impl(const RunConfig& config, int n_seeds) {
  if (n_seeds <= 0) throw std::invalid_argument("simulate_fit_ensemble: n_seeds must be > 0");
  config.validate();
  std::vector<PoissonFit> fits(static_cast<std::size_t>(n_seeds));
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (int i = 0; i < n_seeds; ++i)
    fits[static_cast<std::size_t>(i)] = one_simulate_fit(config, split_seed(config.seed, i));
  return fits;
}

template <bool Parallel>
std::vector<double> sweep_resolution_impl(const RunConfig& base, const std::string& param,
                                          const std::vector<double>& values) {
  std::vector<double> out(values.size());
  // Validate the parameter name up front: an exception must not escape the
  // parallel region below (that would terminate instead of propagating).
  if (!values.empty()) {
    RunConfig probe = base;
    apply_sweep_value(probe, param, values.front());
  }
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(values.size()); ++i) {
    RunConfig c = base;
    apply_sweep_value(c, param, values[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] =
        resolution_electrons(c.detector, c.spectrum, c.cds);
  }
  return out;
}

}  // namespace

std::vector<double> average_periodogram(const NoiseSpectrum& spec, double fs,
                                        std::size_t n, int n_real, std::uint64_t base_seed) {
  return average_periodogram_impl<true>(spec, fs, n, n_real, base_seed);
}

std::vector<double> average_periodogram_serial(const NoiseSpectrum& spec, double fs,
                                               std::size_t n, int n_real,
                                               std::uint64_t base_seed) {
  return average_periodogram_impl<false>(spec, fs, n, n_real, base_seed);
}

std::vector<PoissonFit> simulate_fit_ensemble(const RunConfig& config, int n_seeds) {
  return simulate_fit_ensemble_impl<true>(config, n_seeds);
}

std::vector<PoissonFit> simulate_fit_ensemble_serial(const RunConfig& config, int n_seeds) {
  return simulate_fit_ensemble_impl<false>(config, n_seeds);
}

std::vector<std::string> sweep_parameter_names() {
  return {"t_integration", "pulse_width", "f_cutoff", "t_average",
          "amplitude_1hz", "flicker_exponent", "white_floor", "gm", "c_input"};
}

void apply_sweep_value(RunConfig& config, const std::string& param, double value) {
  if (param == "t_integration") config.cds.t_integration = value;
  else if (param == "pulse_width") config.cds.pulse_width = value;
  else if (param == "f_cutoff") config.cds.f_cutoff = value;
  else if (param == "t_average") config.cds.t_average = value;
  else if (param == "amplitude_1hz") config.spectrum.amplitude_1hz = value;
  else if (param == "flicker_exponent") config.spectrum.flicker_exponent = value;
  else if (param == "white_floor") config.spectrum.white_floor = value;
  else if (param == "gm") config.detector.gm = value;
  else if (param == "c_input") config.detector.c_input = value;
  else throw std::invalid_argument("sweep: unknown parameter '" + param + "'");
}

std::vector<double> sweep_resolution(const RunConfig& base, const std::string& param,
                                     const std::vector<double>& values) {
  return sweep_resolution_impl<true>(base, param, values);
}

std::vector<double> sweep_resolution_serial(const RunConfig& base, const std::string& param,
                                            const std::vector<double>& values) {
  return sweep_resolution_impl<false>(base, param, values);
}

double periodogram_slope(const std::vector<double>& psd, double fs, std::size_t n,
                         double f_lo, double f_hi) {
  const double df = fs / static_cast<double>(n);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long m = 0;
  for (std::size_t k = 1; k < psd.size(); ++k) {
    const double f = k * df;
    if (f < f_lo || f > f_hi || psd[k] <= 0.0) continue;
    const double x = std::log10(f);
    const double y = std::log10(psd[k]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("periodogram_slope: too few bins in band");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace cipd
