#pragma once

// Noiseless OR channel: a pool is positive iff it contains an infected item.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "burstgt/errors.hpp"
#include "burstgt/markov.hpp"
#include "burstgt/test_design.hpp"

namespace burstgt {

struct OutcomeVector {
  std::vector<std::uint8_t> bits;
  std::size_t positive_count = 0;

  std::size_t size() const { return bits.size(); }
  bool positive(std::size_t t) const { return bits[t] != 0; }
};

/// Y_t = 1 iff row t meets the infected set. Probes each row's items against
/// the infection bitmap and stops at the first hit, so cost is at most the
/// number of matrix entries.
inline OutcomeVector run_tests(const TestMatrix& matrix, const InfectionVector& infections) {
  if (matrix.items() != infections.size())
    throw DimensionError("run_tests: matrix has " + std::to_string(matrix.items()) +
                         " items but infection vector has " + std::to_string(infections.size()));
  OutcomeVector out;
  out.bits.assign(matrix.tests(), 0);
  if (infections.infected_count == 0) return out;
  const std::uint8_t* infected = infections.bits.data();
  for (std::size_t t = 0; t < matrix.tests(); ++t) {
    for (std::uint32_t i : matrix.row(t)) {
      if (infected[i]) {
        out.bits[t] = 1;
        ++out.positive_count;
        break;
      }
    }
  }
  return out;
}

}  // namespace burstgt
