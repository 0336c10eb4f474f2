// Benchmark: OpenMP ensemble kernels against their serial references.
#include <omp.h>

#include <chrono>
#include <cstdio>

#include "cipd/ensemble.hpp"

namespace {

template <typename F>
double time_s(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main() {
  using namespace cipd;
  std::printf("threads: %d\n", omp_get_max_threads());

  NoiseSpectrum spec;
  const double fs = 1000.0;
  const std::size_t n = 1 << 14;
  const int reps = 100;

  const double t_ser = time_s([&] { average_periodogram_serial(spec, fs, n, reps, 7); });
  const double t_par = time_s([&] { average_periodogram(spec, fs, n, reps, 7); });
  std::printf("periodogram x%d:  serial %.3fs  openmp %.3fs  speedup %.2fx\n", reps, t_ser,
              t_par, t_ser / t_par);

  RunConfig config;
  config.schedule.mean_photons = 8.0;
  config.schedule.n_pulses = 100;
  config.seed = 1;
  config.seed_set = true;
  const int seeds = 8;
  const double f_ser = time_s([&] { simulate_fit_ensemble_serial(config, seeds); });
  const double f_par = time_s([&] { simulate_fit_ensemble(config, seeds); });
  std::printf("simulate+fit x%d: serial %.3fs  openmp %.3fs  speedup %.2fx\n", seeds, f_ser,
              f_par, f_ser / f_par);

  std::vector<double> grid;
  for (int i = 0; i < 16; ++i) grid.push_back(5.0 + 5.0 * i);
  const double s_ser = time_s([&] { sweep_resolution_serial(config, "f_cutoff", grid); });
  const double s_par = time_s([&] { sweep_resolution(config, "f_cutoff", grid); });
  std::printf("sweep x%zu:        serial %.3fs  openmp %.3fs  speedup %.2fx\n", grid.size(),
              s_ser, s_par, s_ser / s_par);
  return 0;
}
