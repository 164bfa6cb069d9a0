#pragma once

// Randomized conformance checks for the rounding kernel, shared by the unit
// tests and the acceptance runner.

#include <cstdint>
#include <string>

namespace pir::testing {

struct PropertyReport {
  std::string name;
  long cases = 0;
  long failures = 0;
  std::string first_failure;

  bool ok() const { return cases > 0 && failures == 0; }
};

// Random representable values round to themselves, m in [2, 256].
PropertyReport check_idempotence(long cases, std::uint64_t seed);
// add/sub/mul/div/sqrt agree with the exact-rational oracle, including
// constructed midpoints that must go to the even neighbour.
PropertyReport check_correct_rounding(long cases, std::uint64_t seed);
PropertyReport check_ties_to_even(long cases, std::uint64_t seed);
// add(x, y) == x whenever |y| < |x| 2^-(m+1).
PropertyReport check_swamping(long cases, std::uint64_t seed);
// |round_m(x op y) - exact| is non-increasing in m.
PropertyReport check_monotonicity(long cases, std::uint64_t seed);
// Software(53) and Native64 agree bit for bit on random add/mul chains.
PropertyReport check_native64_agreement(long cases, std::uint64_t seed);

}  // namespace pir::testing
