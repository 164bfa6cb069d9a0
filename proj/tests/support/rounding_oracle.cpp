#include "rounding_oracle.hpp"

#include <mpfr.h>

#include <stdexcept>

namespace pir::testing {

Rational::Rational(const SoftFloat& x) {
  mpq_init(q_);
  mpfr_get_q(q_, x.raw());
}

std::string Rational::str() const {
  char* s = mpq_get_str(nullptr, 10, q_);
  std::string out(s);
  void (*freefunc)(void*, size_t);
  mp_get_memory_functions(nullptr, nullptr, &freefunc);
  freefunc(s, out.size() + 1);
  return out;
}

Rational exact_add(const Rational& a, const Rational& b) {
  Rational r;
  mpq_add(r.get(), a.get(), b.get());
  return r;
}

Rational exact_sub(const Rational& a, const Rational& b) {
  Rational r;
  mpq_sub(r.get(), a.get(), b.get());
  return r;
}

Rational exact_mul(const Rational& a, const Rational& b) {
  Rational r;
  mpq_mul(r.get(), a.get(), b.get());
  return r;
}

Rational exact_div(const Rational& a, const Rational& b) {
  if (mpq_sgn(b.get()) == 0) throw std::domain_error("exact_div by zero");
  Rational r;
  mpq_div(r.get(), a.get(), b.get());
  return r;
}

int compare(const Rational& a, const Rational& b) { return mpq_cmp(a.get(), b.get()); }

Rational abs_diff(const Rational& a, const Rational& b) {
  Rational r = exact_sub(a, b);
  mpq_abs(r.get(), r.get());
  return r;
}

namespace {

// Multiply q by 2^k (k may be negative).
void scale2(mpq_ptr out, mpq_srcptr q, long k) {
  if (k >= 0) {
    mpq_mul_2exp(out, q, static_cast<mp_bitcnt_t>(k));
  } else {
    mpq_div_2exp(out, q, static_cast<mp_bitcnt_t>(-k));
  }
}

// floor(log2(q)) for q > 0.
long floor_log2(mpq_srcptr q) {
  long e = static_cast<long>(mpz_sizeinbase(mpq_numref(q), 2)) -
           static_cast<long>(mpz_sizeinbase(mpq_denref(q), 2));
  mpq_t t;
  mpq_init(t);
  // Adjust until 1 <= q / 2^e < 2.
  for (;;) {
    scale2(t, q, -e);
    if (mpz_cmp(mpq_numref(t), mpq_denref(t)) < 0) {
      --e;
      continue;
    }
    mpz_t twice;
    mpz_init(twice);
    mpz_mul_2exp(twice, mpq_denref(t), 1);
    const bool too_big = mpz_cmp(mpq_numref(t), twice) >= 0;
    mpz_clear(twice);
    if (too_big) {
      ++e;
      continue;
    }
    break;
  }
  mpq_clear(t);
  return e;
}

}  // namespace

Rational round_nearest_even(const Rational& q, int m) {
  Rational out;
  const int sign = mpq_sgn(q.get());
  if (sign == 0) return out;
  Rational a(q);
  mpq_abs(a.get(), a.get());
  // Scale so that the significand occupies [2^(m-1), 2^m).
  const long shift = static_cast<long>(m - 1) - floor_log2(a.get());
  mpq_t s;
  mpq_init(s);
  scale2(s, a.get(), shift);
  mpz_t n, rem, twice_rem;
  mpz_inits(n, rem, twice_rem, nullptr);
  mpz_fdiv_qr(n, rem, mpq_numref(s), mpq_denref(s));
  // Compare the fractional part rem/den with 1/2 via 2 rem vs den.
  mpz_mul_2exp(twice_rem, rem, 1);
  const int c = mpz_cmp(twice_rem, mpq_denref(s));
  if (c > 0 || (c == 0 && mpz_odd_p(n))) mpz_add_ui(n, n, 1);
  mpq_set_z(out.get(), n);
  scale2(out.get(), out.get(), -shift);
  if (sign < 0) mpq_neg(out.get(), out.get());
  mpz_clears(n, rem, twice_rem, nullptr);
  mpq_clear(s);
  return out;
}

Rational round_sqrt(const Rational& q, int m) {
  Rational out;
  if (mpq_sgn(q.get()) < 0) throw std::domain_error("round_sqrt of a negative value");
  if (mpq_sgn(q.get()) == 0) return out;
  // sqrt(q) in [2^(e/2), ...): pick k so that floor(sqrt(q 4^k)) has m bits.
  const long e = floor_log2(q.get());
  const long k = static_cast<long>(m) - 1 - (e >= 0 ? e / 2 : -((-e + 1) / 2));
  mpq_t s;
  mpq_init(s);
  scale2(s, q.get(), 2 * k);
  mpz_t fl, n;
  mpz_inits(fl, n, nullptr);
  mpz_fdiv_q(fl, mpq_numref(s), mpq_denref(s));
  mpz_sqrt(n, fl);
  // Compare s with (n + 1/2)^2 = (2n + 1)^2 / 4.
  mpq_t mid;
  mpq_init(mid);
  mpz_t odd;
  mpz_init(odd);
  mpz_mul_2exp(odd, n, 1);
  mpz_add_ui(odd, odd, 1);
  mpz_mul(odd, odd, odd);
  mpq_set_z(mid, odd);
  mpq_div_2exp(mid, mid, 2);
  const int c = mpq_cmp(s, mid);
  if (c > 0 || (c == 0 && mpz_odd_p(n))) mpz_add_ui(n, n, 1);
  mpq_set_z(out.get(), n);
  scale2(out.get(), out.get(), -k);
  mpz_clears(fl, n, odd, nullptr);
  mpq_clears(s, mid, nullptr);
  return out;
}

}  // namespace pir::testing
