#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cipd/noise_model.hpp"

using namespace cipd;

namespace {

// Independent fixed-grid trapezoid oracle for the CDS noise integral:
// 10^6 points over f in (1e-6, 1e4) Hz. Kept deliberately brute force.
double oracle_cds_noise(const NoiseSpectrum& spec, const CdsConfig& cds) {
  const double f_lo = 1e-6, f_hi = 1e4;
  const std::size_t n = 1'000'000;
  const double t0 = cds.effective_t_average();
  auto integrand = [&](double f) {
    const double c = comb_gain(f, cds.t_integration);
    const double b = box_gain(f, t0);
    return spectral_density(spec, f) * c * c * b * b * lowpass_gain_sq(f, cds.f_cutoff);
  };
  const double h = (f_hi - f_lo) / static_cast<double>(n - 1);
  double sum = 0.5 * (integrand(f_lo) + integrand(f_hi));
  for (std::size_t i = 1; i + 1 < n; ++i) sum += integrand(f_lo + i * h);
  return std::sqrt(sum * h);
}

}  // namespace

TEST_CASE("comb gain values and zeros") {
  CHECK(comb_gain(0.0, 1.0) == doctest::Approx(0.0));
  CHECK(comb_gain(0.5, 1.0) == doctest::Approx(2.0));
  CHECK(comb_gain(1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(comb_gain(-1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(comb_gain(NAN, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(comb_gain(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("comb gain is |sin|-periodic with period 1/T and zero at k/T") {
  const double T = 0.73;
  for (int k = 1; k <= 7; ++k) {
    CHECK(std::fabs(comb_gain(k / T, T)) < 1e-9);
    for (double f : {0.11, 0.37, 0.42})
      CHECK(comb_gain(f + k / T, T) == doctest::Approx(comb_gain(f, T)).epsilon(1e-9));
  }
}

TEST_CASE("box gain: DC limit, first zero, half point") {
  const double t0 = 0.99;
  CHECK(box_gain(0.0, t0) == doctest::Approx(1.0));
  CHECK(std::fabs(box_gain(1.0 / t0, t0)) < 1e-12);
  CHECK(box_gain(1.0 / (2.0 * t0), t0) == doctest::Approx(0.6366197723675814));
  for (double f = 0.01; f < 50.0; f *= 1.7) CHECK(box_gain(f, t0) <= 1.0);
  CHECK_THROWS_AS(box_gain(INFINITY, t0), std::invalid_argument);
}

TEST_CASE("lowpass power gain") {
  CHECK(lowpass_gain_sq(0.0, 20.0) == doctest::Approx(1.0));
  CHECK(lowpass_gain_sq(20.0, 20.0) == doctest::Approx(0.5));
  CHECK(lowpass_gain_sq(200.0, 20.0) == doctest::Approx(1.0 / 101.0));
}

TEST_CASE("spectral density: flicker scaling and white floor") {
  NoiseSpectrum spec;
  CHECK(spectral_density(spec, 1.0) == doctest::Approx(470e-9 * 470e-9));
  CHECK(spectral_density(spec, 4.0) == doctest::Approx(470e-9 * 470e-9 / 4.0));
  NoiseSpectrum white{0.0, 1.0, 1e-8};
  CHECK(spectral_density(white, 7.0) == doctest::Approx(1e-16));
  CHECK_THROWS_AS(spectral_density(spec, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(spectral_density(spec, -3.0), std::invalid_argument);
}

TEST_CASE("CDS noise voltage matches the fixed-grid oracle at reference defaults") {
  NoiseSpectrum spec;
  CdsConfig cds;
  const double oracle = oracle_cds_noise(spec, cds);
  // Sanity-pin the oracle itself (microvolt scale, not millivolt).
  CHECK(oracle == doctest::Approx(7.8615e-7).epsilon(1e-3));
  const QuadratureResult quad = cds_noise_quadrature(spec, cds);
  CHECK(quad.converged);
  CHECK(std::fabs(quad.value - oracle) / oracle < 5e-3);
}

TEST_CASE("CDS noise voltage edge cases") {
  CdsConfig cds;
  NoiseSpectrum zero{0.0, 1.0, 0.0};
  CHECK(cds_noise_voltage(zero, cds) == 0.0);

  NoiseSpectrum a;
  NoiseSpectrum a2;
  a2.amplitude_1hz = 2.0 * a.amplitude_1hz;
  CHECK(cds_noise_voltage(a2, cds) ==
        doctest::Approx(2.0 * cds_noise_voltage(a, cds)).epsilon(1e-9));
}

TEST_CASE("rms is linear in amplitude when white floor is zero") {
  CdsConfig cds;
  double ratio0 = 0.0;
  for (double amp : {1e-9, 1e-7, 1e-5}) {
    NoiseSpectrum spec{amp, 1.0, 0.0};
    const double r = cds_noise_voltage(spec, cds) / amp;
    if (ratio0 == 0.0) ratio0 = r;
    CHECK(r == doctest::Approx(ratio0).epsilon(1e-6));
  }
}

TEST_CASE("noise voltage is monotone in amplitude and white floor") {
  CdsConfig cds;
  double prev = 0.0;
  for (double amp : {0.0, 1e-8, 1e-7, 5e-7, 2e-6}) {
    const double v = cds_noise_voltage({amp, 1.0, 1e-9}, cds);
    CHECK(v >= prev);
    prev = v;
  }
  prev = 0.0;
  for (double wf : {0.0, 1e-9, 1e-8, 1e-7}) {
    const double v = cds_noise_voltage({470e-9, 1.0, wf}, cds);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("signal per carrier") {
  DetectorParams det;
  CHECK(signal_per_carrier(det) == doctest::Approx(2.0326121476119397e-6).epsilon(1e-12));

  DetectorParams unity;
  unity.gm = 1.0;
  unity.c_input = kElementaryCharge;
  CHECK(signal_per_carrier(unity) == doctest::Approx(1.0));

  DetectorParams doubled = det;
  doubled.c_input *= 2.0;
  CHECK(signal_per_carrier(doubled) == doctest::Approx(0.5 * signal_per_carrier(det)));
}

TEST_CASE("resolution is the compositional ratio") {
  DetectorParams det;
  NoiseSpectrum spec;
  CdsConfig cds;
  const double res = resolution_electrons(det, spec, cds);
  CHECK(res == doctest::Approx(cds_noise_voltage(spec, cds) / signal_per_carrier(det)));
  CHECK(res == doctest::Approx(0.3868).epsilon(0.01));  // quoted figure: 0.5-electron resolution
  CHECK(res <= 0.5);

  NoiseSpectrum zero{0.0, 1.0, 0.0};
  CHECK(resolution_electrons(det, zero, cds) == 0.0);

  NoiseSpectrum twice;
  twice.amplitude_1hz *= 2.0;
  CHECK(resolution_electrons(det, twice, cds) == doctest::Approx(2.0 * res).epsilon(1e-9));
}

TEST_CASE("parameter validation") {
  DetectorParams det;
  det.gm = 0.0;
  CHECK_THROWS_AS(det.validate(), std::invalid_argument);
  det = {};
  det.quantum_efficiency = 1.5;
  CHECK_THROWS_AS(det.validate(), std::invalid_argument);

  NoiseSpectrum spec;
  spec.flicker_exponent = 2.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);

  CdsConfig cds;
  cds.pulse_width = 2.0;
  CHECK_THROWS_AS(cds.validate(), std::invalid_argument);
  cds = {};
  cds.t_average = 0.9999;  // > t_integration - pulse_width
  CHECK_THROWS_AS(cds.validate(), std::invalid_argument);
}
