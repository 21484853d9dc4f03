#pragma once

// Closed-form error bounds and testing rates for the block design.
//
// Rates are normalized by n q log2 n. Divergences are in bits; e^{-nu} uses
// the natural exponent.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string_view>

#include "burstgt/errors.hpp"
#include "burstgt/markov.hpp"
#include "burstgt/test_design.hpp"

namespace burstgt {

/// D(a || b) between Bernoulli laws, in bits, with 0 log 0 = 0.
inline double kl_div_bernoulli(double a, double b) {
  detail::require(a >= 0.0 && a <= 1.0, "a", "must lie in [0, 1]");
  detail::require(b > 0.0 && b < 1.0, "b", "must lie in (0, 1)");
  // Split into u log(u/v) - u + v terms, each >= 0, so nothing cancels when a ~ b.
  auto term = [](double u, double v) {
    if (u == 0.0) return v;
    const double r = (u - v) / v;
    if (std::abs(r) < 1e-4) return v * r * r * (0.5 + r * (-1.0 / 6.0 + r / 12.0));
    return u * std::log(u / v) - (u - v);
  };
  return (term(a, b) + term(1.0 - a, 1.0 - b)) / std::numbers::ln2;
}

/// (x - y)^2 / (2y) for 0 <= x <= y < 1.
///
/// Normalization: the second derivative of the natural-log divergence in x is
/// 1/x + 1/(1-x) >= 1/y on [x, y], so (x - y)^2 / (2y) bounds D in nats. Since
/// D in bits is D in nats divided by ln 2 < 1, the same expression also
/// bounds kl_div_bernoulli(x, y).
inline double kl_quadratic_lower(double x, double y) {
  detail::require(y > 0.0 && y < 1.0, "y", "must lie in (0, 1)");
  detail::require(x >= 0.0 && x <= y, "x", "must lie in [0, y]");
  const double d = x - y;
  return d * d / (2.0 * y);
}

/// Chernoff bound on P(X_1 <= gamma | U_1 = 1) for X_1 ~ Bin(T, p) and
/// gamma = p (1 - epsilon) T: 2^{-T D(p(1-epsilon) || p)}. epsilon = 0 gives
/// the vacuous value 1.
inline double fn_bound(std::size_t T, double p, double epsilon) {
  detail::require(T >= 1, "T", "must be positive");
  detail::require(p > 0.0 && p < 1.0, "p", "must lie in (0, 1)");
  detail::require(epsilon >= 0.0 && epsilon < 1.0, "epsilon", "must lie in [0, 1)");
  if (epsilon == 0.0) return 1.0;
  return std::exp2(-static_cast<double>(T) * kl_div_bernoulli(p * (1.0 - epsilon), p));
}

namespace detail {

/// exponent * log(1 - p), with 0 * log(0) taken as 0.
inline double log_complement_power(double p, double exponent) {
  if (exponent == 0.0) return 0.0;
  return exponent * std::log1p(-p);
}

}  // namespace detail

/// r_n = [1 - (1 - p1)^{q~ (n/C - 1)} (1 - p2)^{q (C - 1)}] / (1 - q), the base
/// of the geometric false-positive bound.
inline double r_n_constant(double p1, double p2, double q, double q_tilde, std::size_t n, std::size_t C) {
  detail::require(p1 >= 0.0 && p1 <= 1.0, "p1", "must lie in [0, 1]");
  detail::require(p2 >= 0.0 && p2 <= 1.0, "p2", "must lie in [0, 1]");
  detail::require(q >= 0.0 && q < 1.0, "q", "must lie in [0, 1)");
  detail::require(q_tilde >= 0.0 && q_tilde <= 1.0, "q_tilde", "must lie in [0, 1]");
  detail::require(C >= 1 && n % C == 0, "C", "block mismatch: C must divide n");
  const double other_blocks = static_cast<double>(n / C) - 1.0;
  const double log_clean = detail::log_complement_power(p1, q_tilde * other_blocks) +
                           detail::log_complement_power(p2, q * static_cast<double>(C - 1));
  return -std::expm1(log_clean) / (1.0 - q);
}

inline double r_n_constant(const MarkovParams& m, const DesignParams& d) {
  return r_n_constant(d.p1, d.p2, m.q, d.q_tilde, d.n, d.C);
}

/// Lemma-style bound on f(gamma) = P(u~_1 = 1 | X_1 = gamma, U_1 = 0): r_n^gamma.
inline double fp_bound(double gamma, double r_n) {
  detail::require(gamma >= 0.0, "gamma", "must be non-negative");
  detail::require(r_n >= 0.0, "r_n", "must be non-negative");
  if (gamma == 0.0) return 1.0;
  return std::pow(r_n, gamma);
}

struct ErrorBound {
  double fn_term = 0.0;  ///< (expected infected count) * fn_bound
  double fp_term = 0.0;  ///< n * r_n^gamma
  double total = 0.0;
  double r_n = 0.0;
  bool fn_dominates = false;
  bool vacuous = false;  ///< total >= 1
};

/// Pr(E) <= (k log2 n) 2^{-T D(p(1-eps) || p)} + n r_n^{p(1-eps) T}.
/// For chains built from explicit rates (no k'), n q replaces k log2 n.
inline ErrorBound total_error_bound(const MarkovParams& m, const DesignParams& d) {
  detail::require(m.n == d.n, "n", "markov and design disagree on n");
  const double nd = static_cast<double>(m.n);
  const double infected_scale = m.k_prime > 0.0 ? m.k() * std::log2(nd) : nd * m.q;
  ErrorBound b;
  b.r_n = r_n_constant(m, d);
  b.fn_term = infected_scale * fn_bound(d.T, d.p, d.epsilon);
  b.fp_term = nd * fp_bound(d.gamma, b.r_n);
  b.total = b.fn_term + b.fp_term;
  b.fn_dominates = b.fn_term >= b.fp_term;
  b.vacuous = b.total >= 1.0;
  return b;
}

// ---------------------------------------------------------------------------
// Rates

enum class RateKind { converse, achievable, iid_achievable };

inline std::string_view to_string(RateKind k) {
  switch (k) {
    case RateKind::converse: return "converse";
    case RateKind::achievable: return "achievable";
    case RateKind::iid_achievable: return "iid_achievable";
  }
  return "?";
}

struct RateBound {
  double tau = 0.0;
  RateKind kind = RateKind::converse;
  double beta = 0.0;
  double nu = 0.0;
  double C = 0.0;
  double k = 0.0;
  double k_prime = 0.0;
};

/// Block size used to evaluate C -> infinity. The truncation error is at most
/// (k - k') / (C nu |log2(1 - e^{-nu})|).
inline constexpr double kEffectivelyInfiniteC = 1e9;

/// nu log2(1 - e^{-nu}); the achievable rate scales with -1 over this.
inline double nu_objective(double nu) {
  detail::require(nu > 0.0, "nu", "must be positive");
  return nu * std::log2(-std::expm1(-nu));
}

/// tau = -beta / (nu log2(1 - e^{-nu})) + (k' - k) / (C nu log2(1 - e^{-nu})), k = k'/beta.
inline RateBound achievable_rate(double beta, double k_prime, double C, double nu) {
  detail::require(beta > 0.0 && beta <= 1.0, "beta", "must lie in (0, 1]");
  detail::require(k_prime > 0.0, "k_prime", "must be positive");
  detail::require(C >= 1.0, "C", "must be at least 1");
  detail::require(std::isfinite(nu) && nu > 0.0, "nu", "must be positive");
  const double k = k_prime / beta;
  const double denom = nu_objective(nu);
  RateBound r;
  r.tau = -beta / denom + (k_prime - k) / (C * denom);
  r.kind = RateKind::achievable;
  r.beta = beta;
  r.nu = nu;
  r.C = C;
  r.k = k;
  r.k_prime = k_prime;
  return r;
}

/// Per-item rate of the i.i.d. Bernoulli(nu / (n q)) design: -1 / (nu log2(1 - e^{-nu})).
/// Equals 1/ln 2 at nu = ln 2.
inline RateBound iid_achievable_rate(double nu) {
  detail::require(std::isfinite(nu) && nu > 0.0, "nu", "must be positive");
  RateBound r;
  r.tau = -1.0 / nu_objective(nu);
  r.kind = RateKind::iid_achievable;
  r.beta = 1.0;
  r.nu = nu;
  r.C = 1.0;
  return r;
}

inline RateBound converse_rate(double beta) {
  detail::require(beta > 0.0 && beta <= 1.0, "beta", "must lie in (0, 1]");
  RateBound r;
  r.tau = beta;
  r.kind = RateKind::converse;
  r.beta = beta;
  return r;
}

/// The nu in (0, 10] minimizing the achievable rate, i.e. the minimizer of
/// the (negative) objective nu log2(1 - e^{-nu}). Bisection on the analytic
/// derivative log2(1 - e^{-nu}) + nu / ((e^nu - 1) ln 2), bracket width 1e-10
/// or better.
inline double optimize_nu() {
  auto derivative = [](double nu) {
    return std::log2(-std::expm1(-nu)) + nu / (std::expm1(nu) * std::numbers::ln2);
  };
  double lo = 1e-3, hi = 10.0;  // derivative < 0 at lo, > 0 at hi
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (derivative(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// H(U^n) / (n q log2 n) at finite n; its limit lower-bounds any achievable rate.
inline double entropy_rate_ratio(const MarkovParams& m) {
  detail::require(m.n >= 2, "n", "must be at least 2");
  detail::require(m.q > 0.0, "q", "must be positive");
  const double nd = static_cast<double>(m.n);
  return entropy_chain_rule(m.alpha, m.beta, m.n) / (nd * m.q * std::log2(nd));
}

/// n q~ / log2 n for the scaled chain with (k', k = k'/beta) and block size C.
/// Converges to k'(C - 1) + k; dividing by C (1 - 1/n) gives the
/// k' + (k - k')/C form.
inline double appendix_limit_constant(double k_prime, double k, std::size_t C, std::size_t n) {
  detail::require(k > 0.0 && k_prime > 0.0 && k >= k_prime, "k", "need k >= k_prime > 0");
  const MarkovParams m = derive_params(k_prime, k_prime / k, n);
  const double nd = static_cast<double>(n);
  return nd * block_infection_prob(m.q, m.alpha, C) / std::log2(nd);
}

inline double appendix_limit_target(double k_prime, double k, std::size_t C) {
  return k_prime * static_cast<double>(C - 1) + k;
}

}  // namespace burstgt
