#include "kernel_properties.hpp"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include <gmp.h>

#include "pirlab/precision.hpp"
#include "rounding_oracle.hpp"

namespace pir::testing {

namespace {

// Uniform m-bit significand times 2^e, with a random sign.
SoftFloat random_representable(std::mt19937_64& rng, int m, long e_lo, long e_hi) {
  std::uniform_int_distribution<long> exp_dist(e_lo, e_hi);
  // Build the significand limb by limb so m up to 256 is covered.
  SoftFloat x(0.0, m);
  int remaining = m;
  bool first = true;
  while (remaining > 0) {
    const int chunk = remaining > 52 ? 52 : remaining;
    std::uint64_t bits = rng() & ((std::uint64_t{1} << chunk) - 1);
    if (first) bits |= std::uint64_t{1} << (chunk - 1);
    first = false;
    x = ldexp(x, chunk) + SoftFloat::from_scaled(static_cast<std::int64_t>(bits), 0, m);
    remaining -= chunk;
  }
  x = ldexp(x, exp_dist(rng) - m);
  return (rng() & 1) ? -x : x;
}

void record(PropertyReport& r, bool pass, const std::string& what) {
  ++r.cases;
  if (!pass) {
    if (r.failures == 0) r.first_failure = what;
    ++r.failures;
  }
}

std::string describe(const char* op, int m, const SoftFloat& a, const SoftFloat& b) {
  std::ostringstream os;
  os << op << " m=" << m << " a=" << a.to_string(20) << " b=" << b.to_string(20);
  return os.str();
}

}  // namespace

PropertyReport check_idempotence(long cases, std::uint64_t seed) {
  PropertyReport r;
  r.name = "idempotence";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mdist(PrecisionContext::kMinSoftwareBits,
                                           PrecisionContext::kMaxSoftwareBits);
  for (long i = 0; i < cases; ++i) {
    const int m = mdist(rng);
    const SoftFloat x = random_representable(rng, m, -300, 300);
    const SoftFloat wide = round_to(x, PrecisionContext::kMaxSoftwareBits);
    const SoftFloat y = round_to(wide, m);
    record(r, y == x && Rational(y) == Rational(x), describe("round", m, x, x));
  }
  return r;
}

PropertyReport check_correct_rounding(long cases, std::uint64_t seed) {
  PropertyReport r;
  r.name = "correct_rounding";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mdist(2, 256);
  std::uniform_int_distribution<int> opdist(0, 4);
  for (long i = 0; i < cases; ++i) {
    const int m = mdist(rng);
    const PrecisionContext ctx = PrecisionContext::software(m);
    const SoftFloat a = random_representable(rng, m, -40, 40);
    SoftFloat b = random_representable(rng, m, -40, 40);
    const auto op = static_cast<ArithOp>(opdist(rng));
    const Rational qa(a), qb(b);
    Rational expect;
    SoftFloat got;
    switch (op) {
      case ArithOp::add: expect = round_nearest_even(exact_add(qa, qb), m); break;
      case ArithOp::sub: expect = round_nearest_even(exact_sub(qa, qb), m); break;
      case ArithOp::mul: expect = round_nearest_even(exact_mul(qa, qb), m); break;
      case ArithOp::div: expect = round_nearest_even(exact_div(qa, qb), m); break;
      case ArithOp::sqrt: {
        Rational aa(abs(a));
        expect = round_sqrt(aa, m);
        got = rounded_arith(op, abs(a), b, ctx);
        record(r, Rational(got) == expect, describe("sqrt", m, a, b));
        continue;
      }
    }
    got = rounded_arith(op, a, b, ctx);
    record(r, Rational(got) == expect, describe("op", m, a, b));
  }
  return r;
}

PropertyReport check_ties_to_even(long cases, std::uint64_t seed) {
  PropertyReport r;
  r.name = "ties_to_even";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mdist(2, 255);
  for (long i = 0; i < cases; ++i) {
    const int m = mdist(rng);
    const SoftFloat x = random_representable(rng, m, -50, 50);
    // x + ulp/2 is exact at m+1 bits and sits halfway between neighbours.
    const SoftFloat half_ulp = ldexp(SoftFloat(x.sign() > 0 ? 1.0 : -1.0, m + 1), x.exponent() - m - 1);
    const SoftFloat mid = round_to(x, m + 1) + half_ulp;
    const SoftFloat got = round_to(mid, m);
    const Rational expect = round_nearest_even(Rational(mid), m);
    // Last significand bit of the result must be clear.
    Rational sig(abs(got));
    mpq_mul_2exp(sig.get(), sig.get(), static_cast<mp_bitcnt_t>(m + 300));
    mpq_div_2exp(sig.get(), sig.get(), static_cast<mp_bitcnt_t>(got.exponent() + 300));
    const bool even = mpz_cmp_ui(mpq_denref(sig.get()), 1) == 0 && mpz_even_p(mpq_numref(sig.get()));
    record(r, Rational(got) == expect && even && !(Rational(got) == Rational(mid)),
           describe("tie", m, x, mid));
  }
  return r;
}

PropertyReport check_swamping(long cases, std::uint64_t seed) {
  PropertyReport r;
  r.name = "swamping";
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> mdist(2, 256);
  std::uniform_int_distribution<int> gap(1, 40);
  for (long i = 0; i < cases; ++i) {
    const int m = mdist(rng);
    const PrecisionContext ctx = PrecisionContext::software(m);
    const SoftFloat x = random_representable(rng, m, -60, 60);
    // |y| < |x| 2^-(m+1): exponent of y at least m+2 below that of x.
    const SoftFloat y = random_representable(rng, m, 0, 0);
    const SoftFloat ys = ldexp(y, x.exponent() - m - 1 - gap(rng));
    if (!(abs(ys) < ldexp(abs(x), -(m + 1)))) continue;
    record(r, rounded_arith(ArithOp::add, x, ys, ctx) == x, describe("swamp", m, x, ys));
  }
  return r;
}

PropertyReport check_monotonicity(long cases, std::uint64_t seed) {
  PropertyReport r;
  r.name = "monotonicity";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  std::uniform_int_distribution<int> opdist(0, 3);
  for (long i = 0; i < cases; ++i) {
    const double a = u(rng), b = u(rng);
    if (b == 0.0) continue;
    const auto op = static_cast<ArithOp>(opdist(rng));
    const Rational qa(a), qb(b);
    Rational exact;
    switch (op) {
      case ArithOp::add: exact = exact_add(qa, qb); break;
      case ArithOp::sub: exact = exact_sub(qa, qb); break;
      case ArithOp::mul: exact = exact_mul(qa, qb); break;
      default: exact = exact_div(qa, qb); break;
    }
    // Operands are binary64 values, exact at every m >= 53 and deliberately
    // held at 120 bits so that only the result rounding varies with m.
    const SoftFloat sa(a, 120), sb(b, 120);
    Rational prev_err;
    bool ok = true;
    for (int m = 2; m <= 120 && ok; ++m) {
      const SoftFloat got = rounded_arith(op, sa, sb, PrecisionContext::software(m));
      const Rational err = abs_diff(Rational(got), exact);
      if (m > 2 && compare(err, prev_err) > 0) ok = false;
      prev_err = err;
    }
    record(r, ok, describe("monotone", 0, SoftFloat(a, 53), SoftFloat(b, 53)));
  }
  return r;
}

PropertyReport check_native64_agreement(long cases, std::uint64_t seed) {
  PropertyReport r;
  r.name = "native64_agreement";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> len(2, 32);
  const PrecisionContext hw = PrecisionContext::native64();
  for (long i = 0; i < cases; ++i) {
    const int n = len(rng);
    double acc_hw = u(rng);
    SoftFloat acc_sw(acc_hw, 53);
    SoftFloat acc_ctx(acc_hw, 53);
    bool ok = true;
    for (int k = 0; k < n; ++k) {
      const double v = u(rng);
      const bool mul = rng() & 1;
      acc_hw = mul ? acc_hw * v : acc_hw + v;
      acc_sw = mul ? acc_sw * SoftFloat(v, 53) : acc_sw + SoftFloat(v, 53);
      acc_ctx = rounded_arith(mul ? ArithOp::mul : ArithOp::add, acc_ctx, SoftFloat(v, 53), hw);
      std::uint64_t b1, b2, b3;
      const double d_sw = acc_sw.to_double(), d_ctx = acc_ctx.to_double();
      std::memcpy(&b1, &acc_hw, 8);
      std::memcpy(&b2, &d_sw, 8);
      std::memcpy(&b3, &d_ctx, 8);
      if (b1 != b2 || b1 != b3) ok = false;
    }
    record(r, ok, "chain " + std::to_string(i));
  }
  return r;
}

}  // namespace pir::testing
