#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rout::stats {

inline double log_binomial_pmf(std::uint64_t n, double p, std::uint64_t k) {
  if (k > n) return -INFINITY;
  if (p <= 0.0) return k == 0 ? 0.0 : -INFINITY;
  if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return std::lgamma(nn + 1) - std::lgamma(kk + 1) - std::lgamma(nn - kk + 1) + kk * std::log(p) +
         (nn - kk) * std::log1p(-p);
}

inline double binomial_pmf(std::uint64_t n, double p, std::uint64_t k) { return std::exp(log_binomial_pmf(n, p, k)); }

inline double binomial_cdf(std::uint64_t n, double p, std::uint64_t k) {
  double s = 0.0;
  for (std::uint64_t j = 0; j <= std::min(k, n); ++j) s += binomial_pmf(n, p, j);
  return std::min(1.0, s);
}

inline double poisson_pmf(double mean, std::uint64_t k) {
  if (mean <= 0.0) return k == 0 ? 1.0 : 0.0;
  const double kk = static_cast<double>(k);
  return std::exp(-mean + kk * std::log(mean) - std::lgamma(kk + 1));
}

/// Kolmogorov-Smirnov distance between the empirical law of integer samples
/// and a discrete CDF, evaluated at every integer in [0, max sample].
inline double ks_statistic(std::span<const std::uint64_t> samples, const std::function<double(std::uint64_t)>& cdf) {
  if (samples.empty()) return 0.0;
  std::vector<std::uint64_t> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  std::size_t i = 0;
  for (std::uint64_t x = 0; x <= s.back(); ++x) {
    while (i < s.size() && s[i] <= x) ++i;
    d = std::max(d, std::fabs(static_cast<double>(i) / n - cdf(x)));
  }
  return d;
}

/// Asymptotic two-sided KS critical value sqrt(-ln(alpha/2) / 2) / sqrt(N).
/// Conservative for discrete laws.
inline double ks_critical(std::size_t n, double alpha) {
  return std::sqrt(-std::log(alpha / 2.0) / 2.0) / std::sqrt(static_cast<double>(n));
}

struct Summary {
  std::size_t count = 0;
  double mean = NAN;
  double median = NAN;
  double stderr_ = NAN;
};

inline Summary summarize(std::vector<double> xs) {
  Summary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  s.stderr_ = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size())) : 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t m = xs.size() / 2;
  s.median = xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
  return s;
}

/// Standard error of a Bernoulli frequency estimate with success probability p.
inline double bernoulli_se(double p, std::uint64_t trials) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

}  // namespace rout::stats
