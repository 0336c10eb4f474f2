#include "cipd/readout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cipd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

std::size_t pulse_gap_samples(const CdsConfig& cds, double sample_rate) {
  // One guard sample: the signal span opens strictly after the pulse end.
  return static_cast<std::size_t>(std::llround(cds.pulse_width * sample_rate)) + 1;
}

}  // namespace

std::vector<Segment> segment_by_resets(const Trace& trace) {
  trace.validate();
  std::vector<Segment> segments;
  std::size_t begin = 0;
  for (std::size_t r : trace.reset_indices) {
    if (r > begin) segments.push_back({begin, r});
    begin = r;
  }
  if (trace.samples.size() > begin) segments.push_back({begin, trace.samples.size()});
  return segments;
}

std::vector<CdsWindow> make_pulse_windows(const Trace& trace, const CdsConfig& cds) {
  trace.validate();
  cds.validate();
  const double fs = trace.sample_rate;
  const PulseSchedule& sched = trace.schedule;
  const double offset = sched.effective_offset();
  const std::size_t gap = pulse_gap_samples(cds, fs);
  const double t0 = cds.effective_t_average();
  const auto baseline_span = static_cast<std::size_t>(std::llround(0.5 * t0 * fs));
  const auto signal_span = static_cast<std::size_t>(std::llround(t0 * fs));

  const long long period_samples = std::max<long long>(1, std::llround(sched.pulse_period * fs));
  const long n_windows =
      sched.n_pulses > 0
          ? sched.n_pulses
          : static_cast<long>(trace.samples.size() / static_cast<std::size_t>(period_samples)) + 1;

  std::vector<CdsWindow> windows;
  for (long p = 0; p < n_windows; ++p) {
    const auto pulse_start =
        std::llround((p * sched.pulse_period + offset) * fs);
    if (pulse_start < static_cast<long long>(baseline_span)) continue;
    CdsWindow w;
    w.start_index = static_cast<std::size_t>(pulse_start) - baseline_span;
    w.baseline_span = baseline_span;
    w.signal_span = signal_span;
    if (w.end(gap) > trace.samples.size()) continue;
    // Drop windows interrupted by a reset.
    const auto it = std::upper_bound(trace.reset_indices.begin(), trace.reset_indices.end(),
                                     w.start_index);
    if (it != trace.reset_indices.end() && *it < w.end(gap)) continue;
    windows.push_back(w);
  }
  return windows;
}

ReadoutResult cds_estimate(const Trace& trace, const DetectorParams& det, const CdsConfig& cds,
                           const std::vector<CdsWindow>& windows) {
  trace.validate();
  cds.validate();
  const double v_carrier = signal_per_carrier(det);
  const std::size_t gap = pulse_gap_samples(cds, trace.sample_rate);

  ReadoutResult result;
  result.raw_electrons.reserve(windows.size());
  result.flags.reserve(windows.size());

  for (const CdsWindow& w : windows) {
    require(w.baseline_span > 0 && w.signal_span > 0, "cds_estimate: window spans must be > 0");
    require(w.end(gap) <= trace.samples.size(), "cds_estimate: window leaves the trace");
    const auto it = std::upper_bound(trace.reset_indices.begin(), trace.reset_indices.end(),
                                     w.start_index);
    require(it == trace.reset_indices.end() || *it >= w.end(gap),
            "cds_estimate: window crosses a reset");

    double baseline = 0.0;
    for (std::size_t i = w.start_index; i < w.start_index + w.baseline_span; ++i)
      baseline += trace.samples[i];
    baseline /= static_cast<double>(w.baseline_span);

    const std::size_t s0 = w.signal_start(gap);
    double signal = 0.0;
    for (std::size_t i = s0; i < s0 + w.signal_span; ++i) signal += trace.samples[i];
    signal /= static_cast<double>(w.signal_span);

    const double raw = (signal - baseline) / v_carrier;
    result.raw_electrons.push_back(raw);
    result.flags.push_back(std::isfinite(raw) ? kFlagNone : kFlagNonFinite);
  }
  return result;
}

std::vector<long> quantize_counts(const std::vector<double>& raw,
                                  std::vector<std::uint8_t>* flags) {
  std::vector<long> counts(raw.size());
  if (flags != nullptr && flags->size() != raw.size()) flags->assign(raw.size(), kFlagNone);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      counts[i] = 0;
      if (flags != nullptr) (*flags)[i] |= kFlagNonFinite;
      continue;
    }
    const long rounded = static_cast<long>(std::floor(raw[i] + 0.5));
    counts[i] = std::max(rounded, 0L);
  }
  return counts;
}

ReadoutResult read_counts(const Trace& trace, const DetectorParams& det, const CdsConfig& cds,
                          const std::vector<CdsWindow>& windows) {
  ReadoutResult result = cds_estimate(trace, det, cds, windows);
  result.counts = quantize_counts(result.raw_electrons, &result.flags);
  return result;
}

namespace {

// Best single change point of [lo, hi) by sum-of-squared-error reduction.
struct Split {
  std::size_t index = 0;
  double mean_diff = 0.0;
  bool found = false;
};

Split best_split(const std::vector<double>& prefix, std::size_t lo, std::size_t hi) {
  Split best;
  if (hi - lo < 2) return best;
  const double total = prefix[hi] - prefix[lo];
  const double n = static_cast<double>(hi - lo);
  double best_gain = 0.0;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    const double n1 = static_cast<double>(i - lo);
    const double n2 = n - n1;
    const double m1 = (prefix[i] - prefix[lo]) / n1;
    const double m2 = (total - (prefix[i] - prefix[lo])) / n2;
    const double d = m2 - m1;
    const double gain = n1 * n2 / n * d * d;
    if (gain > best_gain) {
      best_gain = gain;
      best.index = i;
      best.mean_diff = d;
      best.found = true;
    }
  }
  return best;
}

}  // namespace

std::vector<StaircaseStep> extract_staircase(const Trace& trace, const DetectorParams& det,
                                             double min_step) {
  trace.validate();
  require(std::isfinite(min_step) && min_step > 0.0, "extract_staircase: min_step must be > 0");
  const double v_carrier = signal_per_carrier(det);
  const double threshold_volts = 0.5 * min_step * v_carrier;

  std::vector<double> prefix(trace.samples.size() + 1, 0.0);
  for (std::size_t i = 0; i < trace.samples.size(); ++i)
    prefix[i + 1] = prefix[i] + trace.samples[i];

  // A step produced by a pulse is a ramp of ~pulse_width; change points
  // within one ramp are clustered and plateau means keep a guard of one
  // ramp length away from each change point.
  const std::size_t guard = static_cast<std::size_t>(
      std::llround(trace.schedule.pulse_width * trace.sample_rate)) + 1;

  std::vector<StaircaseStep> steps;
  for (const Segment& seg : segment_by_resets(trace)) {
    std::vector<std::size_t> points;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{seg.begin, seg.end}};
    while (!stack.empty()) {
      auto [lo, hi] = stack.back();
      stack.pop_back();
      const Split s = best_split(prefix, lo, hi);
      if (!s.found || std::fabs(s.mean_diff) < threshold_volts) continue;
      points.push_back(s.index);
      stack.emplace_back(lo, s.index);
      stack.emplace_back(s.index, hi);
    }
    std::sort(points.begin(), points.end());

    // Collapse clusters of change points closer than one ramp length.
    std::vector<std::size_t> merged;
    for (std::size_t p : points) {
      if (!merged.empty() && p - merged.back() <= guard) continue;
      merged.push_back(p);
    }

    // Plateau means between change points, guarded away from the ramps.
    std::vector<std::size_t> bounds{seg.begin};
    bounds.insert(bounds.end(), merged.begin(), merged.end());
    bounds.push_back(seg.end);
    auto plateau_mean = [&](std::size_t lo, std::size_t hi, bool guard_lo, bool guard_hi,
                            double* mean) {
      const std::size_t a = guard_lo ? lo + guard : lo;
      const std::size_t b = guard_hi ? (hi > guard ? hi - guard : lo) : hi;
      if (b <= a) return false;
      *mean = (prefix[b] - prefix[a]) / static_cast<double>(b - a);
      return true;
    };
    for (std::size_t j = 1; j + 1 < bounds.size(); ++j) {
      double m_prev = 0.0, m_next = 0.0;
      if (!plateau_mean(bounds[j - 1], bounds[j], j > 1, true, &m_prev)) continue;
      if (!plateau_mean(bounds[j], bounds[j + 1], true, j + 2 < bounds.size(), &m_next))
        continue;
      const double h = (m_next - m_prev) / v_carrier;
      if (std::fabs(h) < min_step) continue;
      steps.push_back({bounds[j], h, false});
    }
  }

  // Schedule attribution: a step belongs to pulse p if its change point lies
  // within the pulse span (plus slack for ramp sampling).
  const PulseSchedule& sched = trace.schedule;
  if (sched.n_pulses > 0) {
    const double fs = trace.sample_rate;
    const double offset = sched.effective_offset();
    const long slack = 2;
    for (StaircaseStep& s : steps) {
      bool on = false;
      for (long p = 0; p < sched.n_pulses; ++p) {
        const long long a = std::llround((p * sched.pulse_period + offset) * fs) - slack;
        const long long b =
            std::llround((p * sched.pulse_period + offset + sched.pulse_width) * fs) + slack;
        const auto idx = static_cast<long long>(s.index);
        if (idx >= a && idx <= b) {
          on = true;
          break;
        }
      }
      s.off_schedule = !on;
    }
  }
  return steps;
}

}  // namespace cipd
