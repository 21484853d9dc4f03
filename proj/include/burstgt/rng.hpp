#pragma once

// Seeded random streams.
//
// Every random draw in the library comes from an Rng identified by a
// (master seed, stream index) pair. The engine seed is
//
//   splitmix64(splitmix64(master) + 0x9E3779B97F4A7C15 * (stream + 1))
//
// so streams never share state and results depend only on the pair, not on
// which thread runs them. Uniform and geometric variates are derived from the
// raw 64-bit engine output with fixed formulas, which keeps sequences
// identical across standard library implementations.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace burstgt {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return splitmix64(splitmix64(master) + 0x9E3779B97F4A7C15ULL * (stream + 1));
}

/// Purpose tags for the two draws a Monte Carlo trial makes.
enum class StreamPurpose : std::uint64_t { infections = 0, matrix = 1 };

/// Stream index of a trial's infection or matrix draw: 2*trial (+1 for the matrix).
constexpr std::uint64_t trial_stream(std::uint64_t trial_index, StreamPurpose purpose) noexcept {
  return 2 * trial_index + static_cast<std::uint64_t>(purpose);
}

class Rng {
 public:
  static constexpr std::uint64_t kNever = std::numeric_limits<std::uint64_t>::max();

  Rng(std::uint64_t master_seed, std::uint64_t stream) : engine_(stream_seed(master_seed, stream)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe to pass to log().
  double uniform_open_zero() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Number of failures before the first success of a Bernoulli(p) sequence.
  /// Returns kNever when p == 0.
  std::uint64_t geometric_failures(double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) return kNever;
    const double g = std::floor(std::log(uniform_open_zero()) / std::log1p(-p));
    if (!(g < 1.8e19)) return kNever;
    return static_cast<std::uint64_t>(g);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace burstgt
