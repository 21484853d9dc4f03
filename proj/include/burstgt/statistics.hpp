#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>

#include "burstgt/errors.hpp"

namespace burstgt {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const { return lo <= x && x <= hi; }
  double half_width() const { return 0.5 * (hi - lo); }
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` (95% by default).
/// Empty trials give [0, 1].
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  // The score interval always contains phat; clamp away rounding at the ends.
  return {std::clamp(std::min(center - half, phat), 0.0, 1.0),
          std::clamp(std::max(center + half, phat), 0.0, 1.0)};
}

/// Standard error of a binomial proportion estimate.
inline double proportion_stderr(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return 0.0;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  return std::sqrt(phat * (1.0 - phat) / n);
}

inline double log_binomial_pmf(std::uint64_t trials, double p, std::uint64_t k) {
  if (k > trials) return -std::numeric_limits<double>::infinity();
  if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return k == trials ? 0.0 : -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(trials);
  const double kk = static_cast<double>(k);
  return std::lgamma(n + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(n - kk + 1.0) + kk * std::log(p) +
         (n - kk) * std::log1p(-p);
}

inline constexpr std::uint64_t kExactBinomialMaxTrials = 10000;

/// P(Bin(trials, p) <= x), summed in log space. Exact mode is capped at
/// 10^4 trials.
inline double binomial_cdf(std::uint64_t trials, double p, double x) {
  detail::require(trials <= kExactBinomialMaxTrials, "T", "exact binomial CDF limited to 10^4 trials");
  detail::require(p >= 0.0 && p <= 1.0, "p", "must lie in [0, 1]");
  if (x < 0.0) return 0.0;
  if (x >= static_cast<double>(trials)) return 1.0;
  const auto kmax = static_cast<std::uint64_t>(std::floor(x));
  double peak = -std::numeric_limits<double>::infinity();
  for (std::uint64_t k = 0; k <= kmax; ++k) peak = std::max(peak, log_binomial_pmf(trials, p, k));
  if (!std::isfinite(peak)) return 0.0;
  double sum = 0.0;
  for (std::uint64_t k = 0; k <= kmax; ++k) sum += std::exp(log_binomial_pmf(trials, p, k) - peak);
  return std::min(1.0, std::exp(peak + std::log(sum)));
}

}  // namespace burstgt
