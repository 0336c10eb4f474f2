// Correlated-double-sampling readout: per-window carrier estimation from
// traces, quantization to integer counts, and staircase step extraction.
#pragma once

#include <cstdint>
#include <vector>

#include "cipd/noise_model.hpp"
#include "cipd/signal_sim.hpp"

namespace cipd {

// Half-open index range between consecutive resets.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
};

// One CDS measurement: baseline samples [start_index, start_index+baseline_span),
// then a gap of round(pulse_width * sample_rate) samples containing the pulse,
// then signal samples of length signal_span.
struct CdsWindow {
  std::size_t start_index = 0;
  std::size_t baseline_span = 0;
  std::size_t signal_span = 0;

  std::size_t signal_start(std::size_t gap) const { return start_index + baseline_span + gap; }
  std::size_t end(std::size_t gap) const { return signal_start(gap) + signal_span; }
};

// Per-window anomaly flags.
enum ReadoutFlag : std::uint8_t {
  kFlagNone = 0,
  kFlagNonFinite = 1,       // raw estimate was not finite
  kFlagOffSchedule = 2,     // step detected away from any pulse (suspected RTS)
};

struct ReadoutResult {
  std::vector<double> raw_electrons;  // signed CDS estimates
  std::vector<long> counts;           // quantized, clipped at 0
  std::vector<std::uint8_t> flags;
};

struct StaircaseStep {
  std::size_t index = 0;          // sample index of the change point
  double height_electrons = 0.0;  // signed plateau-to-plateau jump
  bool off_schedule = false;      // not attributable to any scheduled pulse
};

// Contiguous half-open segments between consecutive resets, covering all
// samples; a leading empty segment (reset at index 0) is dropped.
std::vector<Segment> segment_by_resets(const Trace& trace);

// One window per scheduled pulse: baseline of t_average/2 ending at the
// pulse start, signal of t_average starting after the pulse end. Windows
// that would leave the trace or cross a reset are dropped. When the trace
// carries no pulses (n_pulses == 0), windows are laid out on the same
// cadence, one per pulse period that fits.
std::vector<CdsWindow> make_pulse_windows(const Trace& trace, const CdsConfig& cds);

// Per window: (mean of signal span - mean of baseline span) / signal_per_carrier.
// Fills raw_electrons and flags (counts are left to quantize_counts).
// Throws if a window crosses a reset or leaves the trace.
ReadoutResult cds_estimate(const Trace& trace, const DetectorParams& det, const CdsConfig& cds,
                           const std::vector<CdsWindow>& windows);

// Round half up to the nearest integer, clip at 0. Non-finite entries are
// flagged in `flags` (resized to match) and map to 0.
std::vector<long> quantize_counts(const std::vector<double>& raw,
                                  std::vector<std::uint8_t>* flags = nullptr);

// Convenience: cds_estimate + quantize_counts in one result.
ReadoutResult read_counts(const Trace& trace, const DetectorParams& det, const CdsConfig& cds,
                          const std::vector<CdsWindow>& windows);

// Greedy change-point extraction of the staircase: recursive binary
// segmentation of each reset segment, accepting a split while the plateau
// mean difference is at least min_step/2 (in electrons); steps below
// min_step are suppressed. Steps whose change point does not fall inside
// a scheduled pulse (plus one sample of slack) are flagged off-schedule.
std::vector<StaircaseStep> extract_staircase(const Trace& trace, const DetectorParams& det,
                                             double min_step);

}  // namespace cipd
