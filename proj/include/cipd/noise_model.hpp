// Analytic noise budget of the correlated-double-sampling (CDS) readout:
// filter transfer functions, the CDS noise integral, and the
// electron-equivalent signal and resolution figures.
//
// All quantities are SI (volts, farads, seconds, hertz).
#pragma once

#include <stdexcept>
#include <string>

namespace cipd {

constexpr double kElementaryCharge = 1.602176634e-19;  // coulombs

// Physical signal chain: charge-to-voltage conversion and dark generation.
struct DetectorParams {
  double gm = 0.85;                     // source-follower gain
  double c_input = 6.7e-14;             // total input capacitance [F]
  double quantum_efficiency = 0.80;     // photon -> carrier probability
  double dark_rate = 500.0 / 3600.0;    // dark carriers per second

  void validate() const;
};

// Input-referred voltage noise density: flicker term plus a white floor.
// Power density is amplitude_1hz^2 * (1 Hz / f)^alpha + white_floor^2.
struct NoiseSpectrum {
  double amplitude_1hz = 470e-9;   // V/sqrt(Hz) at 1 Hz
  double flicker_exponent = 1.0;   // alpha in [0, 2)
  double white_floor = 0.0;        // V/sqrt(Hz)

  void validate() const;
};

// CDS timing: integration time T, pulse width, averaging span T0 and the
// circuit low-pass cutoff. t_average <= 0 means "use t_integration - pulse_width".
struct CdsConfig {
  double t_integration = 1.0;   // T [s]
  double pulse_width = 0.010;   // Delta [s]
  double f_cutoff = 20.0;       // fc [Hz]
  double t_average = 0.0;       // T0 [s]; derived when <= 0

  double effective_t_average() const {
    return t_average > 0.0 ? t_average : t_integration - pulse_width;
  }
  void validate() const;
};

// |F(f)| of the double-sampling operation: 2|sin(pi f T)|, in [0, 2].
double comb_gain(double f, double t_integration);

// |H(f)| of the T0 boxcar average, normalized to unit DC gain:
// |sin(pi T0 f) / (pi T0 f)|, in [0, 1].
double box_gain(double f, double t_average);

// Power gain of the single-pole low pass: 1 / (1 + (f/fc)^2).
double lowpass_gain_sq(double f, double f_cutoff);

// One-sided voltage noise power density [V^2/Hz] at f > 0.
double spectral_density(const NoiseSpectrum& spec, double f);

struct QuadratureResult {
  double value = 0.0;       // integral estimate
  double tail_bound = 0.0;  // analytic bound on the discarded tail
  bool converged = true;
  long evaluations = 0;
};

// rms noise voltage after CDS: sqrt of the spectral density integrated
// against comb^2 * box^2 * lowpass over (0, inf).
//
// Adaptive Simpson subdivision over (0, 10^3 * fc], seeded at half-periods
// of the comb; the tail beyond is bounded in closed form. Throws on invalid
// inputs; non-convergence is reported in the result, value holds the
// partial estimate.
QuadratureResult cds_noise_quadrature(const NoiseSpectrum& spec, const CdsConfig& cds,
                                      double rel_tol = 1e-6);

double cds_noise_voltage(const NoiseSpectrum& spec, const CdsConfig& cds,
                         double rel_tol = 1e-6);

// Output voltage produced by one integrated carrier: gm * q / C_input.
double signal_per_carrier(const DetectorParams& det);

// Electron-equivalent rms readout noise: cds_noise_voltage / signal_per_carrier.
double resolution_electrons(const DetectorParams& det, const NoiseSpectrum& spec,
                            const CdsConfig& cds, double rel_tol = 1e-6);

}  // namespace cipd
