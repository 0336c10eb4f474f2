// Stochastic synthesis of integration staircase traces: Poisson photon
// arrivals, quantum-efficiency thinning, dark carriers, flicker/white noise,
// random telegraph noise, and periodic mechanical resets.
#pragma once

#include <cstdint>
#include <vector>

#include "cipd/noise_model.hpp"

namespace cipd {

// Optical pulse train: mean_photons per pulse, one pulse per period.
// pulse_start_offset < 0 means "pulse at the end of the period"
// (offset = pulse_period - pulse_width), which leaves a full averaging
// plateau before each pulse.
struct PulseSchedule {
  double mean_photons = 0.0;
  double pulse_period = 1.0;        // s
  double pulse_width = 0.010;       // s
  long n_pulses = 0;
  double pulse_start_offset = -1.0; // s within each period; derived when < 0

  double effective_offset() const {
    return pulse_start_offset >= 0.0 ? pulse_start_offset : pulse_period - pulse_width;
  }
  void validate() const;
};

// Two-state random telegraph noise. rate_up is the low->high transition
// rate, rate_down the high->low rate. Off by default; it models the
// spurious-step error mechanism, not the nominal detector.
struct RtsParams {
  bool enabled = false;
  double amplitude = 0.0;   // V
  double rate_up = 0.0;     // 1/s
  double rate_down = 0.0;   // 1/s

  void validate() const;
};

// Uniformly sampled voltage record plus the bookkeeping needed to read it
// back out: reset positions, the schedule that produced it, and the carrier
// ground truth (kept for diagnostics and end-to-end checks).
struct Trace {
  double sample_rate = 0.0;              // Hz
  std::vector<double> samples;           // V
  std::vector<std::size_t> reset_indices;
  PulseSchedule schedule;
  std::uint64_t seed = 0;

  // Ground truth from synthesis; empty for traces loaded from bare CSV.
  std::vector<long> pulse_carriers;
  std::size_t dark_carrier_count = 0;

  void validate() const;
};

// n_pulses independent Poisson(mean_photons) draws; deterministic per seed.
std::vector<long> generate_photon_counts(double mean_photons, long n_pulses,
                                         std::uint64_t seed);

// Binomial(photons, qe) thinning of one pulse.
long thin_to_carriers(long photons, double qe, std::uint64_t seed);

// Homogeneous Poisson process arrival times in [0, duration), sorted.
std::vector<double> generate_dark_carriers(double rate, double duration, std::uint64_t seed);

// Zero-mean stationary noise whose one-sided periodogram matches
// spectral_density(spec, f). Frequency-domain shaping: complex Gaussian
// spectrum scaled by sqrt of the target density, DC bin zeroed.
std::vector<double> synthesize_flicker_noise(const NoiseSpectrum& spec, double sample_rate,
                                             std::size_t n_samples, std::uint64_t seed);

// Two-level {0, amplitude} continuous-time Markov chain sampled on the grid.
std::vector<double> synthesize_rts(const RtsParams& params, double sample_rate,
                                   std::size_t n_samples, std::uint64_t seed);

// Full staircase synthesis with per-pulse carrier counts supplied by the
// caller (photon statistics already applied). Dark carriers, noise and RTS
// are drawn from sub-seeds of `seed`.
Trace synthesize_trace_from_counts(const DetectorParams& det, const PulseSchedule& schedule,
                                   const std::vector<long>& pulse_carriers,
                                   const NoiseSpectrum& spec, const RtsParams& rts,
                                   double sample_rate, double reset_period,
                                   std::uint64_t seed);

// Full staircase synthesis: Poisson photons per pulse, thinned by the
// detector quantum efficiency. Trace duration is (n_pulses + 1) periods so
// the last pulse has a full averaging plateau after it.
Trace synthesize_trace(const DetectorParams& det, const PulseSchedule& schedule,
                       const NoiseSpectrum& spec, const RtsParams& rts, double sample_rate,
                       double reset_period, std::uint64_t seed);

}  // namespace cipd
