#pragma once

// Two-state Markov infection model.
//
// State 0 (healthy) moves to 1 with probability alpha; state 1 (infected)
// moves back to 0 with probability beta. The chain starts in its stationary
// distribution (q, 1 - q) with q = alpha / (alpha + beta). In the scaled
// regime alpha = k' * log2(n) / n, so roughly k' * log2(n) bursts of mean
// length 1/beta appear in a population of n items.
//
// All logarithms are base 2.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "burstgt/errors.hpp"
#include "burstgt/rng.hpp"

namespace burstgt {

struct MarkovParams {
  double k_prime = 0.0;  ///< 0 when built from explicit rates
  double beta = 0.0;
  std::size_t n = 0;
  double alpha = 0.0;
  double q = 0.0;
  double expected_burst_length = 0.0;

  /// k = k'/beta; the stationary infection rate is about k * log2(n) / n.
  double k() const { return k_prime / beta; }
};

inline void validate_rates(double alpha, double beta) {
  detail::require(alpha >= 0.0 && alpha <= 1.0, "alpha", "must lie in [0, 1]");
  detail::require(beta >= 0.0 && beta <= 1.0, "beta", "must lie in [0, 1]");
  detail::require(alpha + beta > 0.0, "alpha", "alpha and beta cannot both be 0");
}

/// Chain parameters from explicit transition probabilities. Accepts the
/// corner cases (alpha = 0, alpha = 1, beta = 1) the scaled form cannot reach.
inline MarkovParams params_from_rates(double alpha, double beta, std::size_t n) {
  validate_rates(alpha, beta);
  detail::require(n >= 1, "n", "must be positive");
  MarkovParams m;
  m.beta = beta;
  m.n = n;
  m.alpha = alpha;
  m.q = alpha / (alpha + beta);
  m.expected_burst_length = beta > 0.0 ? 1.0 / beta : INFINITY;
  return m;
}

/// Scaled parameters: alpha = k' log2(n) / n and exact stationary q.
inline MarkovParams derive_params(double k_prime, double beta, std::size_t n) {
  detail::require(std::isfinite(k_prime) && k_prime > 0.0, "k_prime", "must be positive");
  detail::require(beta > 0.0 && beta <= 1.0, "beta", "must lie in (0, 1]");
  detail::require(n >= 2, "n", "must be at least 2");
  const double nd = static_cast<double>(n);
  const double alpha = k_prime * std::log2(nd) / nd;
  detail::require(alpha < 1.0, "n", "too small: k_prime * log2(n) / n must be < 1");
  MarkovParams m = params_from_rates(alpha, beta, n);
  m.k_prime = k_prime;
  return m;
}

/// A maximal run of consecutive infected items, 0-based.
struct Burst {
  std::size_t start = 0;
  std::size_t length = 0;
};

struct InfectionVector {
  std::vector<std::uint8_t> bits;
  std::size_t infected_count = 0;
  std::vector<std::size_t> run_starts;

  std::size_t size() const { return bits.size(); }
  bool infected(std::size_t i) const { return bits[i] != 0; }

  static InfectionVector from_bits(std::vector<std::uint8_t> bits) {
    InfectionVector v;
    v.bits = std::move(bits);
    for (std::size_t i = 0; i < v.bits.size(); ++i) {
      if (v.bits[i] == 0) continue;
      v.bits[i] = 1;
      ++v.infected_count;
      if (i == 0 || v.bits[i - 1] == 0) v.run_starts.push_back(i);
    }
    return v;
  }

  static InfectionVector from_bursts(std::size_t n, const std::vector<Burst>& bursts) {
    InfectionVector v;
    v.bits.assign(n, 0);
    v.run_starts.reserve(bursts.size());
    for (const Burst& b : bursts) {
      v.run_starts.push_back(b.start);
      v.infected_count += b.length;
      std::fill_n(v.bits.begin() + static_cast<std::ptrdiff_t>(b.start), b.length, std::uint8_t{1});
    }
    return v;
  }
};

/// Samples the bursts of a length-n chain by jumping over whole runs: the
/// length of a 0-run is 1 + Geometric(alpha) failures, a 1-run 1 + Geometric(beta).
/// `first_state` forces U_1; otherwise U_1 ~ Bernoulli(q).
inline std::vector<Burst> sample_bursts(const MarkovParams& m, Rng& rng,
                                        std::optional<bool> first_state = std::nullopt) {
  std::vector<Burst> bursts;
  const std::size_t n = m.n;
  if (n == 0) return bursts;
  bool state = first_state ? *first_state : rng.bernoulli(m.q);
  std::size_t pos = 0;
  while (pos < n) {
    const std::uint64_t stay = rng.geometric_failures(state ? m.beta : m.alpha);
    const std::size_t remaining = n - pos;
    const std::size_t len = stay >= remaining ? remaining : static_cast<std::size_t>(stay) + 1;
    if (state) bursts.push_back({pos, len});
    pos += len;
    state = !state;
  }
  return bursts;
}

inline InfectionVector sample_infection_vector(const MarkovParams& m, Rng& rng) {
  return InfectionVector::from_bursts(m.n, sample_bursts(m, rng));
}

inline InfectionVector sample_infection_vector(const MarkovParams& m, std::uint64_t seed,
                                               std::uint64_t stream) {
  Rng rng(seed, stream);
  return sample_infection_vector(m, rng);
}

/// Reference sampler drawing every transition individually. O(n) draws.
inline InfectionVector sample_infection_vector_per_bit(const MarkovParams& m, Rng& rng) {
  std::vector<std::uint8_t> bits(m.n, 0);
  if (m.n == 0) return InfectionVector::from_bits(std::move(bits));
  bool state = rng.bernoulli(m.q);
  bits[0] = state;
  for (std::size_t i = 1; i < m.n; ++i) {
    state = state ? !rng.bernoulli(m.beta) : rng.bernoulli(m.alpha);
    bits[i] = state;
  }
  return InfectionVector::from_bits(std::move(bits));
}

// ---------------------------------------------------------------------------
// Entropy of the infection process

/// h2(p) in bits with 0 log 0 = 0.
inline double binary_entropy(double p) {
  detail::require(p >= 0.0 && p <= 1.0, "p", "must lie in [0, 1]");
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

/// H(U^n) = h2(q) + (n - 1) [q h2(beta) + (1 - q) h2(alpha)].
inline double entropy_chain_rule(double alpha, double beta, std::size_t n) {
  validate_rates(alpha, beta);
  detail::require(n >= 1, "n", "must be positive");
  const double q = alpha / (alpha + beta);
  const double conditional = q * binary_entropy(beta) + (1.0 - q) * binary_entropy(alpha);
  return binary_entropy(q) + static_cast<double>(n - 1) * conditional;
}

inline constexpr std::size_t kBruteForceEntropyMaxN = 20;

/// -sum P(u) log2 P(u) over all 2^n sequences. Verification oracle for
/// entropy_chain_rule.
inline double entropy_brute_force(double alpha, double beta, std::size_t n) {
  validate_rates(alpha, beta);
  detail::require(n >= 1, "n", "must be positive");
  detail::require(n <= kBruteForceEntropyMaxN, "n", "brute force limited to n <= 20");
  const double q = alpha / (alpha + beta);
  // transition[from][to]
  const double transition[2][2] = {{1.0 - alpha, alpha}, {beta, 1.0 - beta}};
  double h = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t s = 0; s < count; ++s) {
    unsigned prev = s & 1U;
    double p = prev ? q : 1.0 - q;
    for (std::size_t i = 1; i < n && p > 0.0; ++i) {
      const unsigned cur = (s >> i) & 1U;
      p *= transition[prev][cur];
      prev = cur;
    }
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// Leading-order entropy k' (log2 n)^2.
inline double entropy_asymptotic(double k_prime, std::size_t n) {
  detail::require(n >= 2, "n", "must be at least 2");
  const double l = std::log2(static_cast<double>(n));
  return k_prime * l * l;
}

}  // namespace burstgt
