#pragma once

// Exact-rational rounding reference, independent of MPFR's rounding code:
// operands are lifted to GMP rationals, the operation is carried out
// exactly, and the result is rounded to m bits by explicit integer
// arithmetic with ties going to the even significand.

#include <gmp.h>

#include <string>

#include "pirlab/precision.hpp"

namespace pir::testing {

class Rational {
 public:
  Rational() { mpq_init(q_); }
  explicit Rational(const SoftFloat& x);
  explicit Rational(double x) {
    mpq_init(q_);
    mpq_set_d(q_, x);
  }
  Rational(const Rational& o) {
    mpq_init(q_);
    mpq_set(q_, o.q_);
  }
  Rational& operator=(const Rational& o) {
    mpq_set(q_, o.q_);
    return *this;
  }
  ~Rational() { mpq_clear(q_); }

  mpq_ptr get() { return q_; }
  mpq_srcptr get() const { return q_; }

  friend bool operator==(const Rational& a, const Rational& b) { return mpq_equal(a.q_, b.q_) != 0; }
  std::string str() const;

 private:
  mpq_t q_;
};

Rational exact_add(const Rational& a, const Rational& b);
Rational exact_sub(const Rational& a, const Rational& b);
Rational exact_mul(const Rational& a, const Rational& b);
Rational exact_div(const Rational& a, const Rational& b);

// Nearest m-bit binary value to q, ties to even.
Rational round_nearest_even(const Rational& q, int m);
// Nearest m-bit value to sqrt(q) (q >= 0); sqrt results never tie.
Rational round_sqrt(const Rational& q, int m);

// |a - b| as a rational.
Rational abs_diff(const Rational& a, const Rational& b);
int compare(const Rational& a, const Rational& b);

}  // namespace pir::testing
