#pragma once

// Seeded Monte Carlo engine.
//
// A trial draws an infection vector from stream 2*i and a pooling matrix from
// stream 2*i + 1 (i = stream offset + trial index), runs the OR channel and
// the decoder, and tallies errors. Trials share no mutable state; the batch
// reduction sums integer tallies in trial order, so results do not depend on
// the number of worker threads.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "burstgt/bounds.hpp"
#include "burstgt/decoder.hpp"
#include "burstgt/errors.hpp"
#include "burstgt/markov.hpp"
#include "burstgt/pooled_channel.hpp"
#include "burstgt/rng.hpp"
#include "burstgt/statistics.hpp"
#include "burstgt/test_design.hpp"

namespace burstgt {

enum class DesignKind { block, iid };

inline std::string_view to_string(DesignKind k) { return k == DesignKind::block ? "block" : "iid"; }

struct MarkovInputs {
  double k_prime = 1.0;
  double beta = 0.5;
  std::size_t n = 10000;
  std::optional<double> alpha;  ///< replaces k' log2(n) / n when set
};

struct DesignInputs {
  DesignKind kind = DesignKind::block;
  std::size_t C = 50;
  double nu = std::numbers::ln2;
  double epsilon = 0.1;
  double tau = 1.0;
  DesignOverrides overrides;
};

struct ExperimentConfig {
  MarkovInputs markov;
  DesignInputs design;
  std::size_t trials = 100;
  std::uint64_t master_seed = 1;
  unsigned parallelism = 0;  ///< 0 = auto
};

/// Name of the environment variable consulted when parallelism is "auto".
inline constexpr const char* kThreadsEnvVar = "BURSTGT_THREADS";

inline unsigned resolve_parallelism(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kThreadsEnvVar)) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

/// Fully derived parameters of one experiment.
struct Experiment {
  MarkovParams markov;
  DesignParams design;
  DesignKind kind = DesignKind::block;
};

inline MarkovParams resolve_markov(const MarkovInputs& in) {
  if (in.alpha) return params_from_rates(*in.alpha, in.beta, in.n);
  return derive_params(in.k_prime, in.beta, in.n);
}

inline Experiment resolve(const ExperimentConfig& cfg) {
  detail::require(cfg.trials >= 1, "experiment.trials", "must be at least 1");
  Experiment e;
  e.kind = cfg.design.kind;
  e.markov = resolve_markov(cfg.markov);
  const DesignInputs& d = cfg.design;
  e.design = d.kind == DesignKind::block ? derive_design(e.markov, d.C, d.nu, d.epsilon, d.tau, d.overrides)
                                         : derive_iid_design(e.markov, d.nu, d.epsilon, d.tau, d.overrides);
  return e;
}

struct TrialResult {
  ErrorTally tally;
  std::size_t infected = 0;
  std::size_t n = 0;
  std::size_t screen_violations = 0;
};

inline TestMatrix sample_matrix(const Experiment& e, Rng& rng) {
  if (e.kind == DesignKind::iid) return sample_iid_matrix(e.design.n, e.design.T, e.design.p, rng);
  return sample_block_matrix(e.design, rng);
}

/// One end-to-end trial. `trial_index` already includes any stream offset.
inline TrialResult run_trial(const Experiment& e, std::uint64_t master_seed, std::uint64_t trial_index) {
  Rng infection_rng(master_seed, trial_stream(trial_index, StreamPurpose::infections));
  Rng matrix_rng(master_seed, trial_stream(trial_index, StreamPurpose::matrix));
  const InfectionVector truth = sample_infection_vector(e.markov, infection_rng);
  const TestMatrix matrix = sample_matrix(e, matrix_rng);
  const OutcomeVector outcomes = run_tests(matrix, truth);
  const DecodeResult decoded = decode(matrix, outcomes, e.design.gamma);
  TrialResult r;
  r.tally = tally_errors(truth, decoded.u_hat);
  r.infected = truth.infected_count;
  r.n = truth.size();
  r.screen_violations = screening_violations(truth, decoded.u_tilde);
  return r;
}

inline TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_index) {
  return run_trial(resolve(cfg), cfg.master_seed, trial_index);
}

struct AggregateStats {
  std::uint64_t trials = 0;
  std::uint64_t exact_recovery_errors = 0;
  std::uint64_t fp_items = 0;
  std::uint64_t fn_items = 0;
  std::uint64_t infected_exposures = 0;    ///< infected item-trials
  std::uint64_t uninfected_exposures = 0;  ///< uninfected item-trials
  std::uint64_t screen_violations = 0;

  double p_err = 0.0;
  Interval p_err_ci;
  double fp_rate = 0.0;
  Interval fp_ci;
  double fn_rate = 0.0;
  Interval fn_ci;
  double wall_seconds = 0.0;

  void add(const TrialResult& t) {
    ++trials;
    exact_recovery_errors += t.tally.exact_match ? 0 : 1;
    fp_items += t.tally.false_positives;
    fn_items += t.tally.false_negatives;
    infected_exposures += t.infected;
    uninfected_exposures += t.n - t.infected;
    screen_violations += t.screen_violations;
  }

  /// Recomputes rates and Wilson intervals from the integer tallies.
  void finalize() {
    auto rate = [](std::uint64_t k, std::uint64_t m) {
      return m == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(m);
    };
    p_err = rate(exact_recovery_errors, trials);
    p_err_ci = wilson_interval(exact_recovery_errors, trials);
    fp_rate = rate(fp_items, uninfected_exposures);
    fp_ci = wilson_interval(fp_items, uninfected_exposures);
    fn_rate = rate(fn_items, infected_exposures);
    fn_ci = wilson_interval(fn_items, infected_exposures);
  }

  double p_err_stderr() const { return proportion_stderr(exact_recovery_errors, trials); }
  double fn_stderr() const { return proportion_stderr(fn_items, infected_exposures); }
  double fp_stderr() const { return proportion_stderr(fp_items, uninfected_exposures); }

  /// Integer tallies only; wall time and derived reals are excluded.
  bool same_counts(const AggregateStats& o) const {
    return trials == o.trials && exact_recovery_errors == o.exact_recovery_errors && fp_items == o.fp_items &&
           fn_items == o.fn_items && infected_exposures == o.infected_exposures &&
           uninfected_exposures == o.uninfected_exposures && screen_violations == o.screen_violations;
  }
};

/// Runs `trials` trials with indices stream_offset + [0, trials) on a worker pool.
inline AggregateStats run_batch(const Experiment& e, std::uint64_t master_seed, std::size_t trials,
                                unsigned parallelism, std::uint64_t stream_offset = 0) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<TrialResult> results(trials);
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(resolve_parallelism(parallelism), std::max<std::size_t>(trials, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < trials; i = next.fetch_add(1))
      results[i] = run_trial(e, master_seed, stream_offset + i);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  AggregateStats s;
  for (const TrialResult& r : results) s.add(r);
  s.finalize();
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

inline AggregateStats run_batch(const ExperimentConfig& cfg, std::uint64_t stream_offset = 0) {
  return run_batch(resolve(cfg), cfg.master_seed, cfg.trials, cfg.parallelism, stream_offset);
}

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepAxis { n, tau, beta, C, nu, epsilon };

inline std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::n: return "n";
    case SweepAxis::tau: return "tau";
    case SweepAxis::beta: return "beta";
    case SweepAxis::C: return "C";
    case SweepAxis::nu: return "nu";
    case SweepAxis::epsilon: return "epsilon";
  }
  return "?";
}

inline std::optional<SweepAxis> parse_axis(std::string_view s) {
  for (SweepAxis a : {SweepAxis::n, SweepAxis::tau, SweepAxis::beta, SweepAxis::C, SweepAxis::nu, SweepAxis::epsilon})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

/// Returns a copy of `cfg` with one parameter replaced. Throws ParameterError
/// for values the axis cannot take (e.g. non-integer n).
inline ExperimentConfig with_axis_value(ExperimentConfig cfg, SweepAxis axis, double value) {
  auto as_count = [](double v, const char* field) {
    detail::require(std::isfinite(v) && v >= 1.0 && std::floor(v) == v, field, "must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  switch (axis) {
    case SweepAxis::n: cfg.markov.n = as_count(value, "markov.n"); break;
    case SweepAxis::tau: cfg.design.tau = value; break;
    case SweepAxis::beta: cfg.markov.beta = value; break;
    case SweepAxis::C: cfg.design.C = as_count(value, "design.C"); break;
    case SweepAxis::nu: cfg.design.nu = value; break;
    case SweepAxis::epsilon: cfg.design.epsilon = value; break;
  }
  return cfg;
}

struct SweepCell {
  std::string axis;
  double value = 0.0;
  ExperimentConfig config;
  std::optional<Experiment> experiment;  ///< empty for skipped values
  AggregateStats stats;
  std::string warning;  ///< why the value was skipped
};

/// Stream offset of sweep cell c; cells never share trial streams.
constexpr std::uint64_t sweep_stream_offset(std::size_t cell) noexcept { return std::uint64_t{cell} << 32; }

inline std::vector<SweepCell> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values) {
  std::vector<SweepCell> cells;
  cells.reserve(values.size());
  for (std::size_t c = 0; c < values.size(); ++c) {
    SweepCell cell;
    cell.axis = std::string(to_string(axis));
    cell.value = values[c];
    cell.config = cfg;
    try {
      cell.config = with_axis_value(cfg, axis, values[c]);
      cell.experiment = resolve(cell.config);
    } catch (const ParameterError& err) {
      cell.warning = err.what();
      cells.push_back(std::move(cell));
      continue;
    }
    cell.stats = run_batch(*cell.experiment, cfg.master_seed, cfg.trials, cfg.parallelism, sweep_stream_offset(c));
    cells.push_back(std::move(cell));
  }
  return cells;
}

/// A single experiment as a one-cell table (axis "none").
inline SweepCell simulate(const ExperimentConfig& cfg) {
  SweepCell cell;
  cell.axis = "none";
  cell.config = cfg;
  cell.experiment = resolve(cfg);
  cell.stats = run_batch(*cell.experiment, cfg.master_seed, cfg.trials, cfg.parallelism);
  return cell;
}

// ---------------------------------------------------------------------------
// f(gamma) = P(u~_1 = 1 | X_1 = gamma, U_1 = 0) = p_FP^gamma

struct FGammaPoint {
  unsigned gamma = 0;
  double estimate = 0.0;
  double std_error = 0.0;
};

struct FGammaEstimate {
  double p_fp = 0.0;  ///< P(Y_1 = 1 | X_{1,1} = 1, U_1 = 0)
  double p_fp_stderr = 0.0;
  std::size_t samples = 0;
  std::vector<FGammaPoint> points;
};

inline constexpr std::size_t kMinFGammaSamples = 100;

/// Single-test outcome for a test that contains item 0 (its block selected,
/// the item drawn), with U_1 = 0 and the rest of the chain sampled forward.
/// Only infected items matter, so each sample costs O(#infected).
inline bool sample_single_test_positive(const MarkovParams& m, const DesignParams& d, Rng& rng) {
  const std::vector<Burst> bursts = sample_bursts(m, rng, false);
  std::size_t current_block = static_cast<std::size_t>(-1);
  bool block_selected = false;
  for (const Burst& b : bursts) {
    for (std::size_t j = b.start; j < b.start + b.length; ++j) {
      const std::size_t block = j / d.C;
      if (block != current_block) {
        current_block = block;
        block_selected = block == 0 || rng.bernoulli(d.p1);
      }
      if (block_selected && rng.bernoulli(d.p2)) return true;
    }
  }
  return false;
}

/// Estimates p_FP from `samples` simulated single tests and reports
/// p_FP^gamma with delta-method standard errors gamma p^(gamma-1) se(p).
inline FGammaEstimate estimate_f_gamma(const MarkovParams& m, const DesignParams& d,
                                       const std::vector<unsigned>& gammas, std::size_t samples,
                                       std::uint64_t seed = 1) {
  detail::require(samples >= kMinFGammaSamples, "samples", "need at least 100 samples");
  detail::require(m.n == d.n && d.C >= 1 && d.n % d.C == 0, "C", "block mismatch: C must divide n");
  Rng rng(seed, 0);
  std::uint64_t positives = 0;
  for (std::size_t s = 0; s < samples; ++s) positives += sample_single_test_positive(m, d, rng) ? 1 : 0;
  FGammaEstimate out;
  out.samples = samples;
  out.p_fp = static_cast<double>(positives) / static_cast<double>(samples);
  out.p_fp_stderr = proportion_stderr(positives, samples);
  for (unsigned g : gammas) {
    FGammaPoint pt;
    pt.gamma = g;
    if (g == 0) {
      pt.estimate = 1.0;
      pt.std_error = 0.0;
    } else {
      pt.estimate = std::pow(out.p_fp, g);
      pt.std_error = g * std::pow(out.p_fp, g - 1.0) * out.p_fp_stderr;
    }
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace burstgt
