// Count statistics: histogramming, Poisson maximum-likelihood fit with a
// Pearson chi-square goodness-of-fit test, quantum-efficiency back
// calculation, and dark-rate estimation.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace cipd {

struct Histogram {
  std::map<long, long> counts_by_k;  // carrier number -> occurrences
  long n_samples = 0;

  double mean() const;
};

struct PoissonFit {
  double lambda_hat = 0.0;
  double std_error = 0.0;    // sqrt(lambda_hat / n)
  double chi_square = 0.0;
  long dof = 0;
  double p_value = 1.0;
  bool gof_valid = false;    // false when fewer than 3 merged bins
  long n_samples = 0;
};

struct RateEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

Histogram build_histogram(const std::vector<long>& counts);

// exp(-lambda) lambda^k / k!, evaluated in log space.
double poisson_pmf(double lambda, long k);

// Regularized lower/upper incomplete gamma functions P(a,x) and Q(a,x),
// series + continued fraction, absolute accuracy ~1e-12.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with dof degrees.
double chi_square_sf(double x, long dof);

// MLE fit (lambda_hat = sample mean) plus Pearson chi-square GOF after
// merging adjacent bins until every expected count is >= 5; the Poisson
// tail beyond the largest observed k is folded into the last bin.
// dof = merged_bins - 2. Throws on an empty histogram.
PoissonFit fit_poisson(const Histogram& hist);

// qe_hat = measured_mean / incident_mean, with the standard error of the
// measured mean propagated through the ratio.
RateEstimate estimate_qe(double measured_mean, double measured_std_error,
                         double incident_mean);

// total / (n * window) with Poisson standard error sqrt(total) / (n * window).
RateEstimate estimate_dark_rate(const std::vector<long>& counts, double window);

}  // namespace cipd
