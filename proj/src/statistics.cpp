#include "cipd/statistics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace cipd {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Regularized lower incomplete gamma by its power series (x < a + 1).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma by modified Lentz continued fraction
// (x >= a + 1).
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double Histogram::mean() const {
  if (n_samples == 0) return 0.0;
  double sum = 0.0;
  for (const auto& [k, c] : counts_by_k) sum += static_cast<double>(k) * c;
  return sum / static_cast<double>(n_samples);
}

Histogram build_histogram(const std::vector<long>& counts) {
  Histogram hist;
  for (long c : counts) {
    require(c >= 0, "build_histogram: counts must be >= 0");
    ++hist.counts_by_k[c];
  }
  hist.n_samples = static_cast<long>(counts.size());
  return hist;
}

double poisson_pmf(double lambda, long k) {
  require(std::isfinite(lambda) && lambda >= 0.0, "poisson_pmf: lambda must be >= 0");
  require(k >= 0, "poisson_pmf: k must be >= 0");
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  const double logp = -lambda + k * std::log(lambda) - std::lgamma(k + 1.0);
  return std::exp(logp);
}

double gamma_p(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_p: need a > 0 and x >= 0");
  if (x == 0.0) return 0.0;
  return x < a + 1.0 ? gamma_p_series(a, x) : 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, "gamma_q: need a > 0 and x >= 0");
  if (x == 0.0) return 1.0;
  return x < a + 1.0 ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

double chi_square_sf(double x, long dof) {
  require(dof >= 1, "chi_square_sf: dof must be >= 1");
  require(std::isfinite(x) && x >= 0.0, "chi_square_sf: x must be >= 0");
  return gamma_q(0.5 * static_cast<double>(dof), 0.5 * x);
}

PoissonFit fit_poisson(const Histogram& hist) {
  require(hist.n_samples >= 1, "fit_poisson: histogram is empty");
  for (const auto& [k, c] : hist.counts_by_k)
    require(k >= 0 && c >= 0, "fit_poisson: invalid histogram");

  PoissonFit fit;
  fit.n_samples = hist.n_samples;
  fit.lambda_hat = hist.mean();
  fit.std_error = std::sqrt(fit.lambda_hat / static_cast<double>(hist.n_samples));

  const long k_max = hist.counts_by_k.empty() ? 0 : hist.counts_by_k.rbegin()->first;
  const double n = static_cast<double>(hist.n_samples);

  // Expected counts over k = 0..k_max, Poisson tail folded into the last bin.
  std::vector<double> expected(static_cast<std::size_t>(k_max) + 1, 0.0);
  std::vector<double> observed(static_cast<std::size_t>(k_max) + 1, 0.0);
  double cum = 0.0;
  for (long k = 0; k <= k_max; ++k) {
    const double p = poisson_pmf(fit.lambda_hat, k);
    expected[k] = n * p;
    cum += p;
  }
  expected[k_max] += n * std::max(1.0 - cum, 0.0);
  for (const auto& [k, c] : hist.counts_by_k) observed[k] = static_cast<double>(c);

  // Merge adjacent bins (ascending k) until each expected count is >= 5;
  // a trailing remainder joins the last accepted bin.
  std::vector<double> merged_obs, merged_exp;
  double acc_o = 0.0, acc_e = 0.0;
  for (long k = 0; k <= k_max; ++k) {
    acc_o += observed[k];
    acc_e += expected[k];
    if (acc_e >= 5.0) {
      merged_obs.push_back(acc_o);
      merged_exp.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  if (acc_e > 0.0 && !merged_exp.empty()) {
    merged_obs.back() += acc_o;
    merged_exp.back() += acc_e;
  }

  if (merged_exp.size() < 3) {
    fit.gof_valid = false;
    return fit;
  }
  double chi2 = 0.0;
  for (std::size_t i = 0; i < merged_exp.size(); ++i) {
    const double d = merged_obs[i] - merged_exp[i];
    chi2 += d * d / merged_exp[i];
  }
  fit.chi_square = chi2;
  fit.dof = static_cast<long>(merged_exp.size()) - 2;
  fit.p_value = chi_square_sf(chi2, fit.dof);
  fit.gof_valid = true;
  return fit;
}

RateEstimate estimate_qe(double measured_mean, double measured_std_error,
                         double incident_mean) {
  require(std::isfinite(incident_mean) && incident_mean > 0.0,
          "estimate_qe: incident_mean must be > 0");
  require(std::isfinite(measured_mean) && measured_mean >= 0.0,
          "estimate_qe: measured_mean must be >= 0");
  require(std::isfinite(measured_std_error) && measured_std_error >= 0.0,
          "estimate_qe: measured_std_error must be >= 0");
  return {measured_mean / incident_mean, measured_std_error / incident_mean};
}

RateEstimate estimate_dark_rate(const std::vector<long>& counts, double window) {
  require(std::isfinite(window) && window > 0.0, "estimate_dark_rate: window must be > 0");
  if (counts.empty()) return {0.0, 0.0};
  double total = 0.0;
  for (long c : counts) total += static_cast<double>(c);
  const double denom = static_cast<double>(counts.size()) * window;
  return {total / denom, std::sqrt(std::max(total, 0.0)) / denom};
}

}  // namespace cipd
