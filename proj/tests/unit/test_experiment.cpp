#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "burstgt/experiment.hpp"

using namespace burstgt;

constexpr double kLn2 = std::numbers::ln2;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.markov = {1.0, 0.5, 2000, std::nullopt};
  c.design.C = 20;
  c.design.tau = 1.5 * 0.5 / kLn2;
  c.trials = 40;
  c.master_seed = 7;
  c.parallelism = 1;
  return c;
}

}  // namespace

TEST(RunTrial, AlphaZeroRecoversExactly) {
  ExperimentConfig c = small_config();
  c.markov.alpha = 0.0;
  c.design.overrides = {0.3, 0.9, 50};
  for (std::uint64_t i = 0; i < 20; ++i) {
    const TrialResult r = run_trial(c, i);
    EXPECT_EQ(r.infected, 0u);
    EXPECT_TRUE(r.tally.exact_match);
  }
}

TEST(RunTrial, Deterministic) {
  const ExperimentConfig c = small_config();
  for (std::uint64_t i : {0u, 5u, 123u}) {
    const TrialResult a = run_trial(c, i), b = run_trial(c, i);
    EXPECT_EQ(a.tally, b.tally);
    EXPECT_EQ(a.infected, b.infected);
  }
}

TEST(RunTrial, InvalidConfigThrowsBeforeTrials) {
  ExperimentConfig c = small_config();
  c.design.C = 7;
  EXPECT_THROW(run_batch(c), ParameterError);
  c = small_config();
  c.trials = 0;
  EXPECT_THROW(resolve(c), ParameterError);
}

TEST(RunBatch, SingleTrialIsRunTrial) {
  ExperimentConfig c = small_config();
  c.trials = 1;
  const AggregateStats s = run_batch(c);
  const TrialResult t = run_trial(c, 0);
  EXPECT_EQ(s.trials, 1u);
  EXPECT_EQ(s.fp_items, t.tally.false_positives);
  EXPECT_EQ(s.fn_items, t.tally.false_negatives);
  EXPECT_EQ(s.exact_recovery_errors, t.tally.exact_match ? 0u : 1u);
}

TEST(RunBatch, ParallelismDoesNotChangeCounts) {
  ExperimentConfig c = small_config();
  const AggregateStats one = run_batch(c);
  c.parallelism = 8;
  const AggregateStats eight = run_batch(c);
  EXPECT_TRUE(one.same_counts(eight));
  EXPECT_EQ(one.p_err, eight.p_err);
}

TEST(RunBatch, StatsConsistent) {
  const AggregateStats s = run_batch(small_config());
  EXPECT_DOUBLE_EQ(s.p_err, static_cast<double>(s.exact_recovery_errors) / s.trials);
  EXPECT_TRUE(s.p_err_ci.contains(s.p_err));
  EXPECT_TRUE(s.fp_ci.contains(s.fp_rate));
  EXPECT_TRUE(s.fn_ci.contains(s.fn_rate));
  EXPECT_EQ(s.infected_exposures + s.uninfected_exposures, s.trials * 2000);
  EXPECT_EQ(s.screen_violations, 0u);
}

TEST(RunBatch, FnRateWithinChernoff) {
  ExperimentConfig c;
  c.markov = {1.0, 0.5, 10000, std::nullopt};
  c.design.C = 50;
  c.design.tau = 1.5 * 0.5 / kLn2;
  c.trials = 1000;
  const Experiment e = resolve(c);
  const AggregateStats s = run_batch(e, c.master_seed, c.trials, 0);
  EXPECT_LE(s.fn_rate, fn_bound(e.design.T, e.design.p, e.design.epsilon) + 4 * s.fn_stderr());
  EXPECT_LE(s.p_err, total_error_bound(e.markov, e.design).total + 4 * s.p_err_stderr());
}

TEST(Sweep, SingleValueMatchesRunBatch) {
  const ExperimentConfig c = small_config();
  const auto cells = sweep(c, SweepAxis::n, {2000});
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_TRUE(cells[0].stats.same_counts(run_batch(c)));
}

TEST(Sweep, InvalidValuesBecomeWarnings) {
  const auto cells = sweep(small_config(), SweepAxis::C, {20, 7, 2.5});
  ASSERT_EQ(cells.size(), 3u);
  EXPECT_TRUE(cells[0].experiment.has_value());
  EXPECT_FALSE(cells[1].experiment.has_value());
  EXPECT_NE(cells[1].warning.find("block mismatch"), std::string::npos);
  EXPECT_FALSE(cells[2].experiment.has_value());
}

TEST(Sweep, CellsUseDisjointStreams) {
  const auto cells = sweep(small_config(), SweepAxis::tau, {1.0, 1.0});
  EXPECT_FALSE(cells[0].stats.same_counts(cells[1].stats));
}

TEST(Sweep, MoreTestsDoNotHurt) {
  ExperimentConfig c = small_config();
  c.trials = 200;
  std::vector<double> taus;
  for (double f : {0.6, 0.8, 1.0, 1.2, 1.5}) taus.push_back(f * 0.5 / kLn2);
  const auto cells = sweep(c, SweepAxis::tau, taus);
  for (std::size_t i = 1; i < cells.size(); ++i) {
    const auto& a = cells[i - 1].stats;
    const auto& b = cells[i].stats;
    EXPECT_LE(b.p_err, a.p_err + a.p_err_ci.half_width() + b.p_err_ci.half_width());
    EXPECT_LE(b.fn_rate, a.fn_rate + a.fn_ci.half_width() + b.fn_ci.half_width());
  }
}

TEST(Axis, Parse) {
  EXPECT_EQ(parse_axis("epsilon"), SweepAxis::epsilon);
  EXPECT_FALSE(parse_axis("gamma").has_value());
  EXPECT_THROW(with_axis_value(small_config(), SweepAxis::n, 1000.5), ParameterError);
}

TEST(Parallelism, EnvVar) {
  EXPECT_EQ(resolve_parallelism(3), 3u);
  setenv(kThreadsEnvVar, "5", 1);
  EXPECT_EQ(resolve_parallelism(0), 5u);
  unsetenv(kThreadsEnvVar);
  EXPECT_GE(resolve_parallelism(0), 1u);
}

// ---------------------------------------------------------------------------

TEST(FGamma, GammaZeroAndSampleFloor) {
  ExperimentConfig c;
  c.markov = {1.0, 0.5, 10000, std::nullopt};
  const Experiment e = resolve(c);
  const FGammaEstimate est = estimate_f_gamma(e.markov, e.design, {0, 3}, 1000);
  EXPECT_EQ(est.points[0].estimate, 1.0);
  EXPECT_EQ(est.points[0].std_error, 0.0);
  EXPECT_DOUBLE_EQ(est.points[1].estimate, std::pow(est.p_fp, 3));
  EXPECT_THROW(estimate_f_gamma(e.markov, e.design, {1}, 99), ParameterError);
}

TEST(FGamma, MonotoneAndBelowBound) {
  for (std::size_t C : {10, 50}) {
    ExperimentConfig c;
    c.markov = {1.0, 0.5, 10000, std::nullopt};
    c.design.C = C;
    const Experiment e = resolve(c);
    const FGammaEstimate est = estimate_f_gamma(e.markov, e.design, {1, 2, 4, 8, 16}, 20000, 3);
    const double r = r_n_constant(e.markov, e.design);
    for (std::size_t i = 0; i < est.points.size(); ++i) {
      const auto& pt = est.points[i];
      EXPECT_LE(pt.estimate, fp_bound(pt.gamma, r) + 4 * pt.std_error);
      if (i > 0) {
        EXPECT_LE(pt.estimate, est.points[i - 1].estimate);
      }
    }
  }
}

// The shortcut sampler agrees with full single-row simulation.
TEST(FGamma, ShortcutMatchesFullRow) {
  ExperimentConfig c;
  c.markov = {1.0, 0.5, 2000, std::nullopt};
  c.design.C = 20;
  const Experiment e = resolve(c);
  const std::size_t N = 20000;
  Rng rng(9, 0);
  std::size_t full = 0;
  DesignParams one_row = e.design;
  one_row.T = 1;
  std::size_t kept = 0;
  while (kept < N) {
    const auto bursts = sample_bursts(e.markov, rng, false);
    const InfectionVector u = InfectionVector::from_bursts(e.markov.n, bursts);
    const TestMatrix m = sample_block_matrix(one_row, rng);
    const auto row = m.row(0);
    if (row.empty() || row[0] != 0) continue;  // condition on item 0 in the test
    ++kept;
    full += run_tests(m, u).positive(0);
  }
  const FGammaEstimate est = estimate_f_gamma(e.markov, e.design, {1}, N, 4);
  const double pf = static_cast<double>(full) / N;
  const double se = std::sqrt(pf * (1 - pf) / N + est.p_fp_stderr * est.p_fp_stderr);
  EXPECT_NEAR(est.p_fp, pf, 4 * se);
}
