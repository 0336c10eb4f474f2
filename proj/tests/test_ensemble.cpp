#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cipd/ensemble.hpp"

using namespace cipd;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.schedule.mean_photons = 5.0;
  c.schedule.n_pulses = 30;
  c.seed = 3;
  c.seed_set = true;
  return c;
}

}  // namespace

TEST_CASE("parallel and serial periodogram ensembles agree bitwise") {
  NoiseSpectrum spec;
  const auto par = average_periodogram(spec, 1000.0, 4096, 16, 5);
  const auto ser = average_periodogram_serial(spec, 1000.0, 4096, 16, 5);
  REQUIRE(par.size() == ser.size());
  for (std::size_t k = 0; k < par.size(); ++k) CHECK(par[k] == ser[k]);
}

TEST_CASE("parallel and serial simulate+fit ensembles agree bitwise") {
  const RunConfig c = small_config();
  const auto par = simulate_fit_ensemble(c, 6);
  const auto ser = simulate_fit_ensemble_serial(c, 6);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    CHECK(par[i].lambda_hat == ser[i].lambda_hat);
    CHECK(par[i].chi_square == ser[i].chi_square);
    CHECK(par[i].p_value == ser[i].p_value);
  }
}

TEST_CASE("parallel and serial sweeps agree bitwise") {
  const RunConfig c = small_config();
  const std::vector<double> grid{5.0, 20.0, 80.0};
  const auto par = sweep_resolution(c, "f_cutoff", grid);
  const auto ser = sweep_resolution_serial(c, "f_cutoff", grid);
  REQUIRE(par.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(par[i] == ser[i]);
}

TEST_CASE("sweep: noise is non-decreasing in the lowpass cutoff") {
  const RunConfig c = small_config();
  const auto res = sweep_resolution(c, "f_cutoff", {5.0, 20.0, 80.0});
  CHECK(res[0] <= res[1]);
  CHECK(res[1] <= res[2]);
}

TEST_CASE("sweep: resolution is linear in the flicker amplitude") {
  const RunConfig c = small_config();
  const auto res = sweep_resolution(c, "amplitude_1hz", {235e-9, 470e-9, 940e-9});
  CHECK(res[0] == doctest::Approx(0.5 * res[1]).epsilon(1e-6));
  CHECK(res[2] == doctest::Approx(2.0 * res[1]).epsilon(1e-6));
}

TEST_CASE("sweep rejects unknown parameters") {
  RunConfig c = small_config();
  CHECK_THROWS_AS(apply_sweep_value(c, "not_a_param", 1.0), std::invalid_argument);
  CHECK_THROWS_AS(sweep_resolution(c, "not_a_param", {1.0}), std::invalid_argument);
  for (const auto& name : sweep_parameter_names()) {
    RunConfig d = small_config();
    CHECK_NOTHROW(apply_sweep_value(d, name, 0.5));
  }
}

TEST_CASE("periodogram slope of an exact power law") {
  // Build a synthetic 1/f^1.3 PSD and confirm the fitted slope.
  const double fs = 1000.0;
  const std::size_t n = 8192;
  std::vector<double> psd(n / 2 + 1, 0.0);
  for (std::size_t k = 1; k < psd.size(); ++k)
    psd[k] = std::pow(k * fs / n, -1.3);
  CHECK(periodogram_slope(psd, fs, n, 0.5, 50.0) == doctest::Approx(-1.3).epsilon(1e-6));
}
