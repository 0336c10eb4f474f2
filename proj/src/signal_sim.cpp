#include "cipd/signal_sim.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "cipd/rng.hpp"

namespace cipd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Sub-seed streams for one trace.
enum SeedStream : std::uint64_t {
  kPhotons = 0,
  kThinning = 1,
  kDark = 2,
  kFlicker = 3,
  kRts = 4,
};

// fftw_plan_* is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void PulseSchedule::validate() const {
  require(std::isfinite(mean_photons) && mean_photons >= 0.0,
          "PulseSchedule: mean_photons must be >= 0");
  require(std::isfinite(pulse_period) && std::isfinite(pulse_width) && pulse_width > 0.0 &&
              pulse_width < pulse_period,
          "PulseSchedule: need 0 < pulse_width < pulse_period");
  require(n_pulses >= 0, "PulseSchedule: n_pulses must be >= 0");
  const double off = effective_offset();
  require(off >= 0.0 && off + pulse_width <= pulse_period,
          "PulseSchedule: pulse must fit within its period");
}

void RtsParams::validate() const {
  require(std::isfinite(amplitude) && amplitude >= 0.0, "RtsParams: amplitude must be >= 0");
  require(std::isfinite(rate_up) && rate_up >= 0.0 && std::isfinite(rate_down) && rate_down >= 0.0,
          "RtsParams: rates must be >= 0");
}

void Trace::validate() const {
  require(sample_rate > 0.0, "Trace: sample_rate must be > 0");
  for (std::size_t i = 0; i < reset_indices.size(); ++i) {
    require(reset_indices[i] < samples.size(), "Trace: reset index out of bounds");
    if (i > 0) require(reset_indices[i] > reset_indices[i - 1],
                       "Trace: reset indices must be strictly increasing");
  }
}

std::vector<long> generate_photon_counts(double mean_photons, long n_pulses,
                                         std::uint64_t seed) {
  require(std::isfinite(mean_photons) && mean_photons >= 0.0,
          "generate_photon_counts: mean must be >= 0");
  require(n_pulses >= 0, "generate_photon_counts: n_pulses must be >= 0");
  Rng rng(seed);
  std::vector<long> out(static_cast<std::size_t>(n_pulses));
  for (auto& c : out) c = rng.poisson(mean_photons);
  return out;
}

long thin_to_carriers(long photons, double qe, std::uint64_t seed) {
  require(photons >= 0, "thin_to_carriers: photons must be >= 0");
  require(std::isfinite(qe) && qe >= 0.0 && qe <= 1.0, "thin_to_carriers: qe must be in [0,1]");
  Rng rng(seed);
  return rng.binomial(photons, qe);
}

std::vector<double> generate_dark_carriers(double rate, double duration, std::uint64_t seed) {
  require(std::isfinite(rate) && rate >= 0.0, "generate_dark_carriers: rate must be >= 0");
  require(std::isfinite(duration) && duration >= 0.0,
          "generate_dark_carriers: duration must be >= 0");
  Rng rng(seed);
  const long n = rng.poisson(rate * duration);
  std::vector<double> times(static_cast<std::size_t>(n));
  for (auto& t : times) t = rng.uniform() * duration;
  std::sort(times.begin(), times.end());
  return times;
}

std::vector<double> synthesize_flicker_noise(const NoiseSpectrum& spec, double sample_rate,
                                             std::size_t n_samples, std::uint64_t seed) {
  spec.validate();
  require(sample_rate > 0.0, "synthesize_flicker_noise: sample_rate must be > 0");
  require(n_samples >= 2, "synthesize_flicker_noise: need n_samples >= 2");

  std::vector<double> out(n_samples, 0.0);
  if (spec.amplitude_1hz == 0.0 && spec.white_floor == 0.0) return out;

  const std::size_t n = n_samples;
  const std::size_t n_half = n / 2;
  const double df = sample_rate / static_cast<double>(n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

  std::vector<fftw_complex> spectrum(n_half + 1);
  spectrum[0][0] = 0.0;  // zero-mean: DC bin dropped
  spectrum[0][1] = 0.0;

  Rng rng(seed);
  for (std::size_t k = 1; k <= n_half; ++k) {
    const double f = k * df;
    const double amp = std::sqrt(n * sample_rate * spectral_density(spec, f) / 2.0);
    const double u = rng.normal();
    const double v = rng.normal();
    if (k == n_half && n % 2 == 0) {
      spectrum[k][0] = amp * u;  // Nyquist bin is real
      spectrum[k][1] = 0.0;
    } else {
      spectrum[k][0] = amp * u * inv_sqrt2;
      spectrum[k][1] = amp * v * inv_sqrt2;
    }
  }

  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), spectrum.data(), out.data(),
                                FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  }
  if (plan == nullptr) throw std::runtime_error("synthesize_flicker_noise: FFT plan failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }

  const double scale = 1.0 / static_cast<double>(n);
  for (auto& x : out) x *= scale;
  return out;
}

std::vector<double> synthesize_rts(const RtsParams& params, double sample_rate,
                                   std::size_t n_samples, std::uint64_t seed) {
  params.validate();
  require(sample_rate > 0.0, "synthesize_rts: sample_rate must be > 0");

  std::vector<double> out(n_samples, 0.0);
  if (!params.enabled || params.amplitude == 0.0 || n_samples == 0) return out;

  Rng rng(seed);
  const double total = params.rate_up + params.rate_down;
  bool high = total > 0.0 ? rng.uniform() < params.rate_up / total : false;

  const double dt = 1.0 / sample_rate;
  double t_next;  // time of next transition
  {
    const double rate = high ? params.rate_down : params.rate_up;
    t_next = rate > 0.0 ? rng.exponential(rate) : std::numeric_limits<double>::infinity();
  }
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = i * dt;
    while (t >= t_next) {
      high = !high;
      const double rate = high ? params.rate_down : params.rate_up;
      t_next += rate > 0.0 ? rng.exponential(rate) : std::numeric_limits<double>::infinity();
    }
    out[i] = high ? params.amplitude : 0.0;
  }
  return out;
}

Trace synthesize_trace_from_counts(const DetectorParams& det, const PulseSchedule& schedule,
                                   const std::vector<long>& pulse_carriers,
                                   const NoiseSpectrum& spec, const RtsParams& rts,
                                   double sample_rate, double reset_period,
                                   std::uint64_t seed) {
  det.validate();
  schedule.validate();
  spec.validate();
  rts.validate();
  require(pulse_carriers.size() == static_cast<std::size_t>(schedule.n_pulses),
          "synthesize_trace: carrier counts must match n_pulses");
  require(sample_rate >= 2.0 / schedule.pulse_width,
          "synthesize_trace: sample_rate must resolve the pulse (>= 2/pulse_width)");
  require(std::isfinite(reset_period) ? reset_period >= schedule.pulse_period : true,
          "synthesize_trace: reset_period must be >= pulse_period");
  for (long c : pulse_carriers) require(c >= 0, "synthesize_trace: carrier counts must be >= 0");

  const double duration = (schedule.n_pulses + 1) * schedule.pulse_period;
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  const double dt = 1.0 / sample_rate;
  const double v_carrier = signal_per_carrier(det);
  const double offset = schedule.effective_offset();
  const double width = schedule.pulse_width;

  const std::vector<double> dark =
      generate_dark_carriers(det.dark_rate, duration, split_seed(seed, kDark));
  std::vector<double> noise(n, 0.0);
  if (spec.amplitude_1hz > 0.0 || spec.white_floor > 0.0)
    noise = synthesize_flicker_noise(spec, sample_rate, n, split_seed(seed, kFlicker));
  const std::vector<double> rts_noise =
      synthesize_rts(rts, sample_rate, n, split_seed(seed, kRts));

  Trace trace;
  trace.sample_rate = sample_rate;
  trace.samples.resize(n);
  trace.schedule = schedule;
  trace.seed = seed;
  trace.pulse_carriers = pulse_carriers;
  trace.dark_carrier_count = dark.size();

  // Reset sample indices: one at every multiple of reset_period inside the trace.
  if (std::isfinite(reset_period)) {
    for (long k = 1;; ++k) {
      const std::size_t idx =
          static_cast<std::size_t>(std::llround(k * reset_period * sample_rate));
      if (idx >= n) break;
      trace.reset_indices.push_back(idx);
    }
  }

  // Continuous accumulated charge Q(t): completed pulses + active ramp + dark steps.
  std::size_t dark_ptr = 0;
  std::size_t pulse_ptr = 0;      // first pulse not yet completed at current t
  double completed_carriers = 0;  // sum of carriers of completed pulses
  std::size_t reset_ptr = 0;
  double base_charge = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const double t = i * dt;
    while (dark_ptr < dark.size() && dark[dark_ptr] <= t) ++dark_ptr;
    while (pulse_ptr < pulse_carriers.size() &&
           t >= pulse_ptr * schedule.pulse_period + offset + width) {
      completed_carriers += static_cast<double>(pulse_carriers[pulse_ptr]);
      ++pulse_ptr;
    }
    double q = completed_carriers + static_cast<double>(dark_ptr);
    if (pulse_ptr < pulse_carriers.size()) {
      const double start = pulse_ptr * schedule.pulse_period + offset;
      if (t > start)
        q += static_cast<double>(pulse_carriers[pulse_ptr]) *
             std::min((t - start) / width, 1.0);
    }
    if (reset_ptr < trace.reset_indices.size() && i == trace.reset_indices[reset_ptr]) {
      base_charge = q;
      ++reset_ptr;
    }
    trace.samples[i] = v_carrier * (q - base_charge) + noise[i] + rts_noise[i];
  }
  return trace;
}

Trace synthesize_trace(const DetectorParams& det, const PulseSchedule& schedule,
                       const NoiseSpectrum& spec, const RtsParams& rts, double sample_rate,
                       double reset_period, std::uint64_t seed) {
  const std::vector<long> photons = generate_photon_counts(
      schedule.mean_photons, schedule.n_pulses, split_seed(seed, kPhotons));
  Rng thin_rng(split_seed(seed, kThinning));
  std::vector<long> carriers(photons.size());
  for (std::size_t i = 0; i < photons.size(); ++i)
    carriers[i] = thin_rng.binomial(photons[i], det.quantum_efficiency);
  return synthesize_trace_from_counts(det, schedule, carriers, spec, rts, sample_rate,
                                      reset_period, seed);
}

}  // namespace cipd
