#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "hillgate/errors.hpp"

namespace hillgate {

struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr r;
  r.n = xs.size();
  if (r.n == 0) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(r.n);
  if (r.n < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std_error = std::sqrt(ss / (static_cast<double>(r.n) * (static_cast<double>(r.n) - 1.0)));
  return r;
}

// Standard error of the mean of a correlated stationary series, by batch
// means with ~sqrt(n) batches.
inline MeanStderr batch_means_stderr(const std::vector<double>& xs) {
  MeanStderr r;
  r.n = xs.size();
  if (r.n == 0) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / static_cast<double>(r.n);
  const std::size_t b = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(r.n))));
  const std::size_t nb = r.n / b;
  if (nb < 2) return r;
  std::vector<double> bm(nb, 0.0);
  for (std::size_t k = 0; k < nb; ++k) {
    double t = 0.0;
    for (std::size_t i = 0; i < b; ++i) t += xs[k * b + i];
    bm[k] = t / static_cast<double>(b);
  }
  double mu = 0.0;
  for (double x : bm) mu += x;
  mu /= static_cast<double>(nb);
  double ss = 0.0;
  for (double x : bm) ss += (x - mu) * (x - mu);
  r.std_error = std::sqrt(ss / (static_cast<double>(nb) * (static_cast<double>(nb) - 1.0)));
  return r;
}

// ---- survival functions ----

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_sf(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-14) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

// Regularized upper incomplete gamma Q(a, x), series/continued-fraction split.
inline double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw_invalid("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

inline double chi2_sf(double stat, double dof) { return gamma_q(0.5 * dof, 0.5 * stat); }

inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

// ---- tests ----

// One-sample KS against a CDF; returns the asymptotic p-value.
inline double ks_test_p(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw_invalid("ks_test_p: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
  }
  const double sqn = std::sqrt(n);
  return kolmogorov_sf((sqn + 0.12 + 0.11 / sqn) * d);
}

// Two-sample KS p-value.
inline double ks2_test_p(std::vector<double> xs, std::vector<double> ys) {
  if (xs.empty() || ys.empty()) throw_invalid("ks2_test_p: empty sample");
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double nx = static_cast<double>(xs.size()), ny = static_cast<double>(ys.size());
  while (i < xs.size() && j < ys.size()) {
    const double v = std::min(xs[i], ys[j]);
    while (i < xs.size() && xs[i] <= v) ++i;
    while (j < ys.size() && ys[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  return kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d);
}

// Chi-square goodness of fit of counts against probabilities (sum to 1).
inline double chi2_gof_p(const std::vector<double>& counts, const std::vector<double>& probs) {
  if (counts.size() != probs.size() || counts.size() < 2)
    throw_invalid("chi2_gof_p: bad inputs");
  double n = 0.0;
  for (double c : counts) n += c;
  double stat = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const double e = n * probs[k];
    if (e <= 0.0) throw_invalid("chi2_gof_p: zero expected count");
    stat += (counts[k] - e) * (counts[k] - e) / e;
  }
  return chi2_sf(stat, static_cast<double>(counts.size() - 1));
}

// Chi-square homogeneity test for two sets of category counts.
inline double chi2_homogeneity_p(const std::vector<double>& c1, const std::vector<double>& c2) {
  if (c1.size() != c2.size() || c1.size() < 2) throw_invalid("chi2_homogeneity_p: bad inputs");
  const std::size_t k = c1.size();
  double n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    n1 += c1[i];
    n2 += c2[i];
  }
  double stat = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double tot = c1[i] + c2[i];
    if (tot <= 0.0) continue;
    const double e1 = n1 * tot / (n1 + n2);
    const double e2 = n2 * tot / (n1 + n2);
    stat += (c1[i] - e1) * (c1[i] - e1) / e1 + (c2[i] - e2) * (c2[i] - e2) / e2;
  }
  return chi2_sf(stat, static_cast<double>(k - 1));
}

inline double rayleigh_cdf(double x, double beta) {
  return x <= 0.0 ? 0.0 : 1.0 - std::exp(-0.5 * beta * x * x);
}

}  // namespace hillgate
