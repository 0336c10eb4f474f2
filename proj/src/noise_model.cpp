#include "cipd/noise_model.hpp"

#include <cmath>
#include <limits>

namespace cipd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void DetectorParams::validate() const {
  require(finite(gm) && gm > 0.0 && gm <= 1.0, "DetectorParams: gm must be in (0,1]");
  require(finite(c_input) && c_input > 0.0, "DetectorParams: c_input must be > 0");
  require(finite(quantum_efficiency) && quantum_efficiency >= 0.0 && quantum_efficiency <= 1.0,
          "DetectorParams: quantum_efficiency must be in [0,1]");
  require(finite(dark_rate) && dark_rate >= 0.0, "DetectorParams: dark_rate must be >= 0");
}

void NoiseSpectrum::validate() const {
  require(finite(amplitude_1hz) && amplitude_1hz >= 0.0,
          "NoiseSpectrum: amplitude_1hz must be >= 0");
  require(finite(white_floor) && white_floor >= 0.0, "NoiseSpectrum: white_floor must be >= 0");
  require(finite(flicker_exponent) && flicker_exponent >= 0.0 && flicker_exponent < 2.0,
          "NoiseSpectrum: flicker_exponent must be in [0,2)");
}

void CdsConfig::validate() const {
  require(finite(t_integration) && finite(pulse_width) && finite(f_cutoff) && finite(t_average),
          "CdsConfig: non-finite field");
  require(pulse_width > 0.0 && pulse_width < t_integration,
          "CdsConfig: need 0 < pulse_width < t_integration");
  require(f_cutoff > 0.0, "CdsConfig: f_cutoff must be > 0");
  const double t0 = effective_t_average();
  require(t0 > 0.0 && t0 <= t_integration - pulse_width,
          "CdsConfig: need 0 < t_average <= t_integration - pulse_width");
}

double comb_gain(double f, double t_integration) {
  require(finite(f) && f >= 0.0, "comb_gain: f must be finite and >= 0");
  require(finite(t_integration) && t_integration > 0.0, "comb_gain: t_integration must be > 0");
  return 2.0 * std::fabs(std::sin(M_PI * f * t_integration));
}

double box_gain(double f, double t_average) {
  require(finite(f) && f >= 0.0, "box_gain: f must be finite and >= 0");
  require(finite(t_average) && t_average > 0.0, "box_gain: t_average must be > 0");
  const double x = M_PI * t_average * f;
  if (x == 0.0) return 1.0;
  return std::fabs(std::sin(x) / x);
}

double lowpass_gain_sq(double f, double f_cutoff) {
  require(finite(f) && f >= 0.0, "lowpass_gain_sq: f must be finite and >= 0");
  require(finite(f_cutoff) && f_cutoff > 0.0, "lowpass_gain_sq: f_cutoff must be > 0");
  const double r = f / f_cutoff;
  return 1.0 / (1.0 + r * r);
}

double spectral_density(const NoiseSpectrum& spec, double f) {
  spec.validate();
  require(finite(f) && f > 0.0, "spectral_density: f must be > 0");
  const double flicker =
      spec.amplitude_1hz * spec.amplitude_1hz * std::pow(1.0 / f, spec.flicker_exponent);
  return flicker + spec.white_floor * spec.white_floor;
}

namespace {

struct Integrand {
  const NoiseSpectrum& spec;
  const CdsConfig& cds;
  double t0;
  mutable long evals = 0;

  double operator()(double f) const {
    ++evals;
    if (f <= 0.0) return 0.0;  // comb^2 ~ 4 pi^2 f^2 T^2 kills the flicker pole
    const double c = comb_gain(f, cds.t_integration);
    const double b = box_gain(f, t0);
    return spectral_density(spec, f) * c * c * b * b * lowpass_gain_sq(f, cds.f_cutoff);
  }
};

// Recursive adaptive Simpson on [a, b] with Richardson acceptance.
template <typename F>
double adaptive_simpson(const F& fn, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth, bool* converged) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = fn(lm), frm = fn(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0) {
    *converged = false;
    return left + right + delta / 15.0;
  }
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(fn, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, converged) +
         adaptive_simpson(fn, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, converged);
}

}  // namespace

QuadratureResult cds_noise_quadrature(const NoiseSpectrum& spec, const CdsConfig& cds,
                                      double rel_tol) {
  spec.validate();
  cds.validate();
  require(std::isfinite(rel_tol) && rel_tol > 0.0, "cds_noise_quadrature: rel_tol must be > 0");

  QuadratureResult out;
  if (spec.amplitude_1hz == 0.0 && spec.white_floor == 0.0) return out;

  Integrand fn{spec, cds, cds.effective_t_average()};

  const double f_max = 1e3 * cds.f_cutoff;
  const double half_period = 0.5 / cds.t_integration;  // comb oscillation scale

  // First pass at a loose tolerance to fix the absolute error budget.
  double total = 0.0;
  bool converged = true;
  for (int pass = 0; pass < 2; ++pass) {
    const double abs_tol_total = pass == 0 ? 0.0 : rel_tol * total;
    const long n_panels = static_cast<long>(std::ceil(f_max / half_period));
    double sum = 0.0;
    converged = true;
    double a = 0.0, fa = fn(0.0);
    for (long k = 0; k < n_panels; ++k) {
      const double b = std::min((k + 1) * half_period, f_max);
      const double m = 0.5 * (a + b);
      const double fb = fn(b), fm = fn(m);
      const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
      const double tol = pass == 0 ? std::fabs(whole) * 1e-3 + 1e-300
                                   : abs_tol_total / n_panels + 1e-300;
      sum += adaptive_simpson(fn, a, b, fa, fm, fb, whole, tol, 30, &converged);
      a = b;
      fa = fb;
    }
    total = sum;
    if (total <= 0.0) break;
  }

  // Tail bound for f > f_max: comb^2 <= 4, box^2 <= 1, lowpass <= fc^2/f^2.
  // integral <= 4 fc^2 * [ A^2 / ((1+alpha) f^(1+alpha)) + w^2 / f ]_f_max.
  const double a2 = spec.amplitude_1hz * spec.amplitude_1hz;
  const double w2 = spec.white_floor * spec.white_floor;
  const double al = spec.flicker_exponent;
  const double tail = 4.0 * cds.f_cutoff * cds.f_cutoff *
                      (a2 / ((1.0 + al) * std::pow(f_max, 1.0 + al)) + w2 / f_max);

  out.value = std::sqrt(std::max(total, 0.0));
  out.tail_bound = std::sqrt(std::max(total, 0.0) + tail) - out.value;
  out.converged = converged;
  out.evaluations = fn.evals;
  return out;
}

double cds_noise_voltage(const NoiseSpectrum& spec, const CdsConfig& cds, double rel_tol) {
  return cds_noise_quadrature(spec, cds, rel_tol).value;
}

double signal_per_carrier(const DetectorParams& det) {
  det.validate();
  return det.gm * kElementaryCharge / det.c_input;
}

double resolution_electrons(const DetectorParams& det, const NoiseSpectrum& spec,
                            const CdsConfig& cds, double rel_tol) {
  return cds_noise_voltage(spec, cds, rel_tol) / signal_per_carrier(det);
}

}  // namespace cipd
