#pragma once

// Per-item two-step decoder.
//
// 1. Screening: an item that sits in any negative pool is cleared (u~_i = 0).
//    Items never tested keep u~_i = 1.
// 2. Threshold: a surviving item is declared infected iff its participation
//    count X_i reaches gamma. gamma stays real; no rounding.
//
// Under the OR channel an infected item only ever sits in positive pools, so
// screening never clears an infected item.

#include <cstddef>
#include <cstdint>
#include <string>
#include <span>
#include <vector>

#include "burstgt/errors.hpp"
#include "burstgt/markov.hpp"
#include "burstgt/pooled_channel.hpp"
#include "burstgt/test_design.hpp"

namespace burstgt {

struct DecodeResult {
  std::vector<std::uint8_t> u_tilde;
  std::vector<std::uint8_t> u_hat;
  double gamma = 0.0;
};

struct ErrorTally {
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  bool exact_match = true;

  bool operator==(const ErrorTally&) const = default;
};

inline std::vector<std::uint8_t> screen(const TestMatrix& matrix, const OutcomeVector& outcomes) {
  if (matrix.tests() != outcomes.size())
    throw DimensionError("screen: matrix has " + std::to_string(matrix.tests()) + " tests but " +
                         std::to_string(outcomes.size()) + " outcomes were given");
  std::vector<std::uint8_t> u_tilde(matrix.items(), 1);
  for (std::size_t t = 0; t < matrix.tests(); ++t) {
    if (outcomes.bits[t]) continue;
    for (std::uint32_t i : matrix.row(t)) u_tilde[i] = 0;
  }
  return u_tilde;
}

inline std::vector<std::uint8_t> threshold_decode(std::span<const std::uint8_t> u_tilde,
                                                  std::span<const std::uint32_t> counts, double gamma) {
  if (u_tilde.size() != counts.size()) throw DimensionError("threshold_decode: length mismatch");
  detail::require(gamma >= 0.0, "gamma", "must be non-negative");
  std::vector<std::uint8_t> u_hat(u_tilde.size(), 0);
  for (std::size_t i = 0; i < u_tilde.size(); ++i)
    u_hat[i] = (u_tilde[i] != 0 && static_cast<double>(counts[i]) >= gamma) ? 1 : 0;
  return u_hat;
}

inline DecodeResult decode(const TestMatrix& matrix, const OutcomeVector& outcomes, double gamma) {
  DecodeResult r;
  r.gamma = gamma;
  r.u_tilde = screen(matrix, outcomes);
  r.u_hat = threshold_decode(r.u_tilde, matrix.participation_counts(), gamma);
  return r;
}

inline ErrorTally tally_errors(const InfectionVector& truth, std::span<const std::uint8_t> estimate) {
  if (truth.size() != estimate.size()) throw DimensionError("tally_errors: length mismatch");
  ErrorTally tally;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const bool u = truth.bits[i] != 0;
    const bool e = estimate[i] != 0;
    tally.false_positives += (!u && e);
    tally.false_negatives += (u && !e);
  }
  tally.exact_match = tally.false_positives == 0 && tally.false_negatives == 0;
  return tally;
}

/// Infected items that screening cleared. Always zero for a correct channel
/// and decoder.
inline std::size_t screening_violations(const InfectionVector& truth, std::span<const std::uint8_t> u_tilde) {
  std::size_t bad = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) bad += (truth.bits[i] != 0 && u_tilde[i] == 0);
  return bad;
}

}  // namespace burstgt
