#pragma once

// Theory-vs-empirics check suites behind `burstgt validate`.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "burstgt/bounds.hpp"
#include "burstgt/experiment.hpp"
#include "burstgt/markov.hpp"
#include "burstgt/statistics.hpp"

namespace burstgt {

struct Check {
  std::string suite;
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double tolerance = 0.0;  ///< the limit `measured` was held against
};

enum class Suite { entropy, chernoff, lemma1, bounds, endtoend, all };

inline std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::entropy: return "entropy";
    case Suite::chernoff: return "chernoff";
    case Suite::lemma1: return "lemma1";
    case Suite::bounds: return "bounds";
    case Suite::endtoend: return "endtoend";
    case Suite::all: return "all";
  }
  return "?";
}

inline std::optional<Suite> parse_suite(std::string_view s) {
  for (Suite x : {Suite::entropy, Suite::chernoff, Suite::lemma1, Suite::bounds, Suite::endtoend, Suite::all})
    if (to_string(x) == s) return x;
  return std::nullopt;
}

struct ValidationOptions {
  std::size_t lemma1_samples = 100000;
  std::size_t endtoend_trials = 1000;
  std::uint64_t seed = 1;
  unsigned parallelism = 0;
};

namespace detail {

inline Check make_check(std::string_view suite, std::string name, bool pass, double measured, double tolerance) {
  return Check{std::string(suite), std::move(name), pass, measured, tolerance};
}

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace detail

/// Chain-rule entropy against exhaustive enumeration, n = 2..12, one check per (alpha, beta).
inline std::vector<Check> validate_entropy() {
  std::vector<Check> out;
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double b : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      double worst = 0.0;
      for (std::size_t n = 2; n <= 12; ++n)
        worst = std::max(worst, std::abs(entropy_chain_rule(a, b, n) - entropy_brute_force(a, b, n)));
      out.push_back(detail::make_check("entropy", "chain rule vs enumeration a=" + detail::fmt(a) + " b=" + detail::fmt(b),
                                       worst <= 1e-9, worst, 1e-9));
    }
  }
  return out;
}

/// Exact binomial lower tail at gamma = p(1-eps)T against the Chernoff bound.
inline std::vector<Check> validate_chernoff() {
  std::vector<Check> out;
  for (std::size_t T : {50, 200, 1000}) {
    for (double p : {0.01, 0.05, 0.2}) {
      for (double eps : {0.1, 0.3, 0.5}) {
        const double tail = binomial_cdf(T, p, p * (1.0 - eps) * static_cast<double>(T));
        const double bound = fn_bound(T, p, eps);
        out.push_back(detail::make_check(
            "chernoff", "tail <= bound T=" + std::to_string(T) + " p=" + detail::fmt(p) + " eps=" + detail::fmt(eps),
            tail <= bound, tail, bound));
      }
    }
  }
  return out;
}

/// Reference setting for the f(gamma) study: n = 10^4, C = 50, k' = 1, beta = 0.5.
inline Experiment lemma1_reference() {
  ExperimentConfig cfg;
  cfg.markov = {1.0, 0.5, 10000, std::nullopt};
  cfg.design.C = 50;
  return resolve(cfg);
}

inline std::vector<Check> validate_lemma1(const ValidationOptions& opt = {}) {
  const Experiment e = lemma1_reference();
  const std::vector<unsigned> gammas = {1, 2, 4, 8, 16};
  const FGammaEstimate est = estimate_f_gamma(e.markov, e.design, gammas, opt.lemma1_samples, opt.seed);
  const double r = r_n_constant(e.markov, e.design);
  std::vector<Check> out;
  for (std::size_t i = 0; i < est.points.size(); ++i) {
    const FGammaPoint& pt = est.points[i];
    const double limit = fp_bound(pt.gamma, r) + 4.0 * pt.std_error;
    out.push_back(detail::make_check("lemma1", "f(" + std::to_string(pt.gamma) + ") <= r_n^gamma + 4se",
                                     pt.estimate <= limit, pt.estimate, limit));
    if (i == 0) continue;
    const FGammaPoint& prev = est.points[i - 1];
    const double slack = 2.0 * std::max(pt.std_error, prev.std_error);
    out.push_back(detail::make_check(
        "lemma1", "f(" + std::to_string(pt.gamma) + ") <= f(" + std::to_string(prev.gamma) + ") + 2se",
        pt.estimate <= prev.estimate + slack, pt.estimate, prev.estimate + slack));
  }
  return out;
}

inline std::vector<Check> validate_bounds() {
  std::vector<Check> out;
  constexpr double ln2 = std::numbers::ln2;
  const double nu_star = optimize_nu();
  out.push_back(detail::make_check("bounds", "optimize_nu = ln 2", std::abs(nu_star - ln2) <= 1e-6,
                                   std::abs(nu_star - ln2), 1e-6));
  const double tau = achievable_rate(0.5, 1.0, kEffectivelyInfiniteC, nu_star).tau;
  out.push_back(detail::make_check("bounds", "achievable rate beta=0.5 = 0.5/ln 2",
                                   std::abs(tau - 0.5 / ln2) <= 1e-5, std::abs(tau - 0.5 / ln2), 1e-5));
  for (double beta : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const double ratio = achievable_rate(beta, 1.0, kEffectivelyInfiniteC, ln2).tau / converse_rate(beta).tau;
    const double dev = std::abs(ratio - 1.0 / ln2);
    out.push_back(
        detail::make_check("bounds", "achievable/converse = 1/ln 2 beta=" + detail::fmt(beta), dev <= 1e-6, dev, 1e-6));
  }
  const double iid = iid_achievable_rate(ln2).tau;
  out.push_back(detail::make_check("bounds", "iid rate = 1/ln 2", std::abs(iid - 1.0 / ln2) <= 1e-12,
                                   std::abs(iid - 1.0 / ln2), 1e-12));

  double worst_gap = 0.0;  // min over grid of D - quadratic, must stay >= 0
  bool first = true;
  for (int i = 1; i <= 100; ++i) {
    const double y = i / 101.0;
    for (int j = 0; j < 100; ++j) {
      const double x = std::min(y, y * j / 99.0);
      const double gap = kl_div_bernoulli(x, y) - kl_quadratic_lower(x, y);
      if (first || gap < worst_gap) worst_gap = gap;
      first = false;
    }
  }
  out.push_back(detail::make_check("bounds", "KL >= (x-y)^2/(2y) on 100x100 grid", worst_gap >= -1e-15, worst_gap, 0.0));

  double prev = 0.0;
  bool decreasing = true;
  for (std::size_t e = 14; e <= 24; e += 2) {
    const double ratio = entropy_rate_ratio(derive_params(1.0, 0.5, std::size_t{1} << e));
    if (e > 14 && !(ratio < prev)) decreasing = false;
    prev = ratio;
  }
  out.push_back(detail::make_check("bounds", "entropy ratio decreasing in n (k'=1, beta=0.5)", decreasing, prev, 0.5));

  double gap_prev = 0.0;
  bool shrinking = true;
  for (std::size_t n : {std::size_t{1000000}, std::size_t{10000000}, std::size_t{100000000}}) {
    const MarkovParams m = derive_params(1.0, 0.5, n);
    const DesignParams d = derive_design(m, 50, ln2, 0.1, 1.0);
    const double gap = std::abs(r_n_constant(m, d) - 0.5);
    if (n > 1000000 && !(gap < gap_prev)) shrinking = false;
    gap_prev = gap;
  }
  out.push_back(detail::make_check("bounds", "|r_n - (1 - e^-nu)| shrinks with n", shrinking, gap_prev, 1e-3));
  return out;
}

/// Monte Carlo checks at n = 10^4, C = 50, k' = 1, beta = 0.5, tau = 1.5 beta / ln 2.
inline std::vector<Check> validate_endtoend(const ValidationOptions& opt = {}) {
  std::vector<Check> out;
  ExperimentConfig cfg;
  cfg.markov = {1.0, 0.5, 10000, std::nullopt};
  cfg.design.C = 50;
  cfg.design.epsilon = 0.1;
  cfg.design.tau = 1.5 * 0.5 / std::numbers::ln2;
  cfg.trials = opt.endtoend_trials;
  cfg.master_seed = opt.seed;
  cfg.parallelism = opt.parallelism;
  const Experiment e = resolve(cfg);
  const AggregateStats s = run_batch(e, cfg.master_seed, cfg.trials, cfg.parallelism);

  const double fn_limit = fn_bound(e.design.T, e.design.p, e.design.epsilon) + 4.0 * s.fn_stderr();
  out.push_back(detail::make_check("endtoend", "fn_rate <= Chernoff bound + 4se", s.fn_rate <= fn_limit, s.fn_rate, fn_limit));
  const ErrorBound b = total_error_bound(e.markov, e.design);
  const double err_limit = b.total + 4.0 * s.p_err_stderr();
  out.push_back(
      detail::make_check("endtoend", "p_err <= total error bound + 4se", s.p_err <= err_limit, s.p_err, err_limit));
  out.push_back(detail::make_check("endtoend", "no infected item screened out", s.screen_violations == 0,
                                   static_cast<double>(s.screen_violations), 0.0));

  ExperimentConfig small = cfg;
  small.trials = std::min<std::size_t>(cfg.trials, 50);
  small.parallelism = 1;
  const AggregateStats one = run_batch(small);
  small.parallelism = 4;
  const AggregateStats four = run_batch(small);
  out.push_back(detail::make_check("endtoend", "counts identical at parallelism 1 and 4", one.same_counts(four),
                                   static_cast<double>(four.exact_recovery_errors),
                                   static_cast<double>(one.exact_recovery_errors)));

  ExperimentConfig empty = cfg;
  empty.markov.alpha = 0.0;
  empty.design.overrides = {0.5, 1.0, 100};
  empty.trials = 20;
  const AggregateStats z = run_batch(empty);
  out.push_back(detail::make_check("endtoend", "alpha=0 recovers 0^n every trial", z.exact_recovery_errors == 0,
                                   static_cast<double>(z.exact_recovery_errors), 0.0));
  return out;
}

inline std::vector<Check> run_suite(Suite suite, const ValidationOptions& opt = {}) {
  std::vector<Check> out;
  auto append = [&out](std::vector<Check> v) { out.insert(out.end(), v.begin(), v.end()); };
  const bool all = suite == Suite::all;
  if (all || suite == Suite::entropy) append(validate_entropy());
  if (all || suite == Suite::chernoff) append(validate_chernoff());
  if (all || suite == Suite::lemma1) append(validate_lemma1(opt));
  if (all || suite == Suite::bounds) append(validate_bounds());
  if (all || suite == Suite::endtoend) append(validate_endtoend(opt));
  return out;
}

inline bool all_pass(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

}  // namespace burstgt
