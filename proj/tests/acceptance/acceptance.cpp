// Acceptance checks, one PASS/FAIL line per criterion.
//
//   acceptance [criterion ...]     (default: all, 1..12)
//
// Criteria 9-12 share their Monte Carlo runs; 10 counts screening violations
// over every trial run in this process. Exit status is 0 iff every requested
// criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "burstgt/burstgt.hpp"
#include "oracles.hpp"

using namespace burstgt;

namespace {

constexpr double kLn2 = std::numbers::ln2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double nu = optimize_nu();
  const double tau = achievable_rate(0.5, 1.0, 1e9, nu).tau;
  const double secs = seconds_since(t0);
  const bool ok = std::abs(nu - 0.6931472) <= 1e-6 && std::abs(tau - 0.721348) <= 1e-5 && secs < 1.0;
  return {ok, fmt("nu*=%.9f (|d|=%.2e), tau(beta=0.5, C=1e9)=%.8f (|d|=%.2e), %.3fs", nu, std::abs(nu - 0.6931472),
                  tau, std::abs(tau - 0.721348), secs)};
}

Outcome criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double beta : {0.1, 0.25, 0.5, 0.75, 1.0}) {
    const double ratio = achievable_rate(beta, 1.0, 1e9, kLn2).tau / converse_rate(beta).tau;
    worst = std::max(worst, std::abs(ratio - 1.442695));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 1.0, fmt("max |ratio - 1.442695| = %.2e over 5 betas, %.3fs", worst, secs)};
}

Outcome criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (double b : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (std::size_t n = 2; n <= 12; ++n) {
        worst = std::max(worst, std::abs(entropy_chain_rule(a, b, n) - entropy_brute_force(a, b, n)));
        ++points;
      }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 30.0, fmt("max |chain - brute| = %.2e bits over %d points, %.3fs", worst, points, secs)};
}

Outcome criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> r;
  for (std::size_t e = 14; e <= 24; e += 2) r.push_back(entropy_rate_ratio(derive_params(1.0, 0.5, std::size_t{1} << e)));
  const double secs = seconds_since(t0);
  bool decreasing = true;
  for (std::size_t i = 1; i < r.size(); ++i) decreasing = decreasing && r[i] < r[i - 1];
  const double d14 = std::abs(r.front() - 0.5), d24 = std::abs(r.back() - 0.5);
  const bool ok = decreasing && d24 * 2.0 <= d14 && secs < 1.0;
  std::string series;
  for (double x : r) series += fmt("%.5f ", x);
  return {ok, fmt("ratios n=2^14..2^24: %sdecreasing=%s |r-0.5|: %.5f -> %.5f (need factor 2 shrink)", series.c_str(),
                  decreasing ? "yes" : "no", d14, d24)};
}

Outcome criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  int violations = 0;
  double max_ratio = 0.0;
  for (std::size_t T : {50, 200, 1000})
    for (double p : {0.01, 0.05, 0.2})
      for (double eps : {0.1, 0.3, 0.5}) {
        const double x = p * (1.0 - eps) * static_cast<double>(T);
        const double tail = oracle::binomial_lower_tail(T, p, x);
        const double own = binomial_cdf(T, p, x);
        const double bound = fn_bound(T, p, eps);
        violations += !(tail <= bound) || !(own <= bound);
        max_ratio = std::max(max_ratio, tail / bound);
      }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 10.0,
          fmt("27 grid points, %d violations, max tail/bound = %.4f, %.3fs", violations, max_ratio, secs)};
}

Outcome criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  int violations = 0;
  double min_gap = 1.0;
  for (int i = 1; i <= 100; ++i) {
    const double y = i / 101.0;
    for (int j = 0; j < 100; ++j) {
      const double x = std::min(y, y * j / 99.0);
      const double gap = kl_div_bernoulli(x, y) - kl_quadratic_lower(x, y);
      violations += gap < 0.0;
      min_gap = std::min(min_gap, gap);
    }
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 1.0,
          fmt("100x100 grid (x <= y), %d violations, min(D - (x-y)^2/(2y)) = %.3e, %.3fs", violations, min_gap, secs)};
}

Outcome criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const Experiment e = lemma1_reference();
  const FGammaEstimate est = estimate_f_gamma(e.markov, e.design, {1, 2, 4, 8, 16}, 100000, 7);
  const double r = r_n_constant(e.markov, e.design);
  const double secs = seconds_since(t0);
  bool ok = secs < 120.0;
  std::string series;
  for (std::size_t i = 0; i < est.points.size(); ++i) {
    const FGammaPoint& pt = est.points[i];
    ok = ok && pt.estimate <= fp_bound(pt.gamma, r) + 4.0 * pt.std_error;
    if (i > 0) {
      const FGammaPoint& prev = est.points[i - 1];
      ok = ok && pt.estimate <= prev.estimate + 2.0 * std::max(pt.std_error, prev.std_error);
    }
    series += fmt("f(%u)=%.3g<=%.3g ", pt.gamma, pt.estimate, fp_bound(pt.gamma, r));
  }
  return {ok, fmt("p_fp=%.4f r_n=%.4f %s%.2fs", est.p_fp, r, series.c_str(), secs)};
}

Outcome criterion_8() {
  const auto t0 = std::chrono::steady_clock::now();
  const MarkovParams m = derive_params(1.0, 0.5, 100000000);
  const DesignParams d = derive_design(m, 50, kLn2, 0.1, 1.0);
  const double r = r_n_constant(m, d);
  const double secs = seconds_since(t0);
  return {std::abs(r - 0.5) <= 1e-3 && secs < 1.0,
          fmt("r_n(n=1e8, k'=1, beta=0.5, C=50, nu=ln2) = %.6f, |r_n - 0.5| = %.2e (limit 1e-3)", r, std::abs(r - 0.5))};
}

// ---------------------------------------------------------------------------
// Monte Carlo criteria

struct McState {
  std::uint64_t trials = 0;
  std::uint64_t screen_violations = 0;
  std::vector<AggregateStats> c9;  // parallelism 1, n = 1e4, 3e4, 1e5
  Experiment c9_largest;

  void record(const AggregateStats& s) {
    trials += s.trials;
    screen_violations += s.screen_violations;
  }
};

constexpr std::size_t kTrials = 500;
constexpr std::uint64_t kSeed = 20240611;

ExperimentConfig c9_config(std::size_t n, unsigned parallelism) {
  ExperimentConfig c;
  c.markov = {1.0, 0.5, n, std::nullopt};
  c.design.C = 50;
  c.design.nu = kLn2;
  c.design.epsilon = 0.1;
  c.design.tau = 1.3 * 0.5 / kLn2;
  c.trials = kTrials;
  c.master_seed = kSeed;
  c.parallelism = parallelism;
  return c;
}

const std::vector<std::size_t> kC9Sizes = {10000, 30000, 100000};

void run_c9(McState& st) {
  if (!st.c9.empty()) return;
  for (std::size_t n : kC9Sizes) {
    const ExperimentConfig c = c9_config(n, 1);
    const Experiment e = resolve(c);
    st.c9.push_back(run_batch(e, c.master_seed, c.trials, c.parallelism));
    st.record(st.c9.back());
    if (n == kC9Sizes.back()) st.c9_largest = e;
  }
}

Outcome criterion_9(McState& st) {
  const auto t0 = std::chrono::steady_clock::now();
  run_c9(st);
  const double secs = seconds_since(t0);
  bool trend = true;
  for (std::size_t i = 1; i < st.c9.size(); ++i) {
    const AggregateStats& a = st.c9[i - 1];
    const AggregateStats& b = st.c9[i];
    trend = trend && b.p_err <= a.p_err + a.p_err_ci.half_width() + b.p_err_ci.half_width();
  }
  const AggregateStats& last = st.c9.back();
  const ErrorBound bound = total_error_bound(st.c9_largest.markov, st.c9_largest.design);
  const bool within = last.p_err <= bound.total + 4.0 * last.p_err_stderr();
  std::string series;
  for (std::size_t i = 0; i < st.c9.size(); ++i)
    series += fmt("n=%zu p_err=%.3f [%.3f,%.3f] ", kC9Sizes[i], st.c9[i].p_err, st.c9[i].p_err_ci.lo,
                  st.c9[i].p_err_ci.hi);
  return {trend && within && secs < 600.0,
          fmt("%strend=%s; n=1e5 bound=%.3f (fn %.3f, fp %.3g; >= 1 so vacuous) within=%s, %.1fs", series.c_str(),
              trend ? "ok" : "broken", bound.total, bound.fn_term, bound.fp_term, within ? "yes" : "no", secs)};
}

Outcome criterion_11(McState& st) {
  run_c9(st);
  bool same = true;
  std::string detail;
  for (std::size_t i = 0; i < kC9Sizes.size(); ++i) {
    const ExperimentConfig c = c9_config(kC9Sizes[i], 8);
    const AggregateStats eight = run_batch(resolve(c), c.master_seed, c.trials, 8);
    st.record(eight);
    const bool eq = eight.same_counts(st.c9[i]);
    same = same && eq;
    detail += fmt("n=%zu errors %llu/%llu fp %llu/%llu fn %llu/%llu; ", kC9Sizes[i],
                  static_cast<unsigned long long>(st.c9[i].exact_recovery_errors),
                  static_cast<unsigned long long>(eight.exact_recovery_errors),
                  static_cast<unsigned long long>(st.c9[i].fp_items), static_cast<unsigned long long>(eight.fp_items),
                  static_cast<unsigned long long>(st.c9[i].fn_items), static_cast<unsigned long long>(eight.fn_items));
  }
  return {same, "parallelism 1 vs 8: " + detail};
}

Outcome criterion_12(McState& st) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig block;
  block.markov = {1.0, 0.25, 100000, std::nullopt};
  block.design.C = 50;
  block.design.nu = kLn2;
  block.design.epsilon = 0.1;
  block.trials = kTrials;
  block.master_seed = kSeed + 12;
  block.parallelism = 0;
  ExperimentConfig iid = block;
  iid.design.kind = DesignKind::iid;

  std::vector<double> taus;
  for (double f : {0.5, 0.75, 1.0, 1.25}) taus.push_back(f / kLn2);
  const auto block_cells = sweep(block, SweepAxis::tau, taus);
  const auto iid_cells = sweep(iid, SweepAxis::tau, taus);
  std::string series;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    st.record(block_cells[i].stats);
    st.record(iid_cells[i].stats);
    series += fmt("tau=%.3f T=%zu block %.3f iid %.3f; ", taus[i], block_cells[i].experiment->design.T,
                  block_cells[i].stats.p_err, iid_cells[i].stats.p_err);
  }
  const AggregateStats& b = block_cells[0].stats;
  const AggregateStats& u = iid_cells[0].stats;
  const bool same_T = block_cells[0].experiment->design.T == iid_cells[0].experiment->design.T;
  const bool lower = b.p_err <= u.p_err + b.p_err_ci.half_width() + u.p_err_ci.half_width();
  const bool strictly = b.p_err < u.p_err;
  const double secs = seconds_since(t0);
  return {same_T && lower && secs < 900.0,
          fmt("%sat tau=0.5/ln2: block %.3f vs iid %.3f (strictly lower: %s), %.1fs", series.c_str(), b.p_err, u.p_err,
              strictly ? "yes" : "no, equal within CI", secs)};
}

Outcome criterion_10(const McState& st) {
  return {st.trials > 0 && st.screen_violations == 0,
          fmt("%llu screening violations over %llu Monte Carlo trials",
              static_cast<unsigned long long>(st.screen_violations), static_cast<unsigned long long>(st.trials))};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > 12) {
      std::fprintf(stderr, "unknown criterion '%s'\n", argv[i]);
      return 2;
    }
    wanted.insert(c);
  }
  if (wanted.empty())
    for (int c = 1; c <= 12; ++c) wanted.insert(c);

  McState mc;
  bool all = true;
  // 10 is evaluated last so it sees every trial of 9, 11 and 12.
  std::vector<int> order(wanted.begin(), wanted.end());
  std::stable_partition(order.begin(), order.end(), [](int c) { return c != 10; });
  for (int c : order) {
    Outcome o;
    try {
      switch (c) {
        case 1: o = criterion_1(); break;
        case 2: o = criterion_2(); break;
        case 3: o = criterion_3(); break;
        case 4: o = criterion_4(); break;
        case 5: o = criterion_5(); break;
        case 6: o = criterion_6(); break;
        case 7: o = criterion_7(); break;
        case 8: o = criterion_8(); break;
        case 9: o = criterion_9(mc); break;
        case 10:
          if (mc.trials == 0) run_c9(mc);
          o = criterion_10(mc);
          break;
        case 11: o = criterion_11(mc); break;
        case 12: o = criterion_12(mc); break;
      }
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    all = all && o.pass;
    std::printf("%s criterion %d: %s\n", o.pass ? "PASS" : "FAIL", c, o.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
