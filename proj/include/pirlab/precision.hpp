#pragma once

// Finite-precision arithmetic backends.
//
// A PrecisionContext names one of three arithmetic backends:
//   Software(m)  every operation rounds to an m-bit significand (2 <= m <= 256),
//                round-to-nearest ties-to-even, no subnormals;
//   Native32     hardware binary32 (reported as m = 23);
//   Native64     hardware binary64 (m = 53).
// The relative resolution floor is eps = 2^-m.

#include <cstdint>
#include <string>

#include <mpfr.h>

#include "pirlab/error.hpp"

namespace pir {

enum class Backend { Software, Native32, Native64 };

const char* to_string(Backend backend) noexcept;
Backend backend_from_string(const std::string& name);

class PrecisionContext {
 public:
  static constexpr int kMinSoftwareBits = 2;
  static constexpr int kMaxSoftwareBits = 256;

  static PrecisionContext software(int bits);
  static PrecisionContext native32() { return PrecisionContext(Backend::Native32, 23); }
  static PrecisionContext native64() { return PrecisionContext(Backend::Native64, 53); }
  static PrecisionContext create(Backend backend, int bits = 0);

  Backend backend() const noexcept { return backend_; }
  int bits() const noexcept { return bits_; }
  int base() const noexcept { return 2; }

  // eps = 2^-m; exactly representable in binary64 for every supported m.
  double epsilon() const noexcept;

  // Decimal digits an arbitrary-precision package would need: ceil(m / log2 10).
  int decimal_digits() const noexcept;

  // Significand width actually used by the arithmetic (24 for binary32).
  int effective_bits() const noexcept;

  std::string label() const;

  friend bool operator==(const PrecisionContext&, const PrecisionContext&) = default;

 private:
  PrecisionContext(Backend backend, int bits) : backend_(backend), bits_(bits) {}

  Backend backend_;
  int bits_;
};

// m_eff = DR / (20 log10 2). Throws Errc::domain for negative input.
double bits_from_dynamic_range_db(double dynamic_range_db);

// Real number with an m-bit significand. Each value carries its precision;
// binary operations produce a result at the wider of the two operand
// precisions (operands in this code base always share a context).
class SoftFloat {
 public:
  explicit SoftFloat(int bits = 53);
  SoftFloat(double value, int bits);
  SoftFloat(const SoftFloat& other);
  SoftFloat(SoftFloat&& other) noexcept;
  SoftFloat& operator=(const SoftFloat& other);
  SoftFloat& operator=(SoftFloat&& other) noexcept;
  ~SoftFloat();

  // mantissa * 2^exp2 rounded to `bits`.
  static SoftFloat from_scaled(std::int64_t mantissa, long exp2, int bits);
  // Decimal string, rounded to nearest at `bits`.
  static SoftFloat from_string(const std::string& text, int bits);

  int precision() const noexcept { return static_cast<int>(mpfr_get_prec(value_)); }

  double to_double() const noexcept { return mpfr_get_d(value_, MPFR_RNDN); }
  float to_float() const noexcept { return mpfr_get_flt(value_, MPFR_RNDN); }
  std::string to_string(int digits = 0) const;

  bool is_zero() const noexcept { return mpfr_zero_p(value_) != 0; }
  bool is_finite() const noexcept { return mpfr_number_p(value_) != 0; }
  int sign() const noexcept { return mpfr_sgn(value_); }
  // Binary exponent e with 0.5 <= |x| / 2^e < 1; meaningless for zero.
  long exponent() const noexcept { return mpfr_get_exp(value_); }

  mpfr_srcptr raw() const noexcept { return value_; }
  mpfr_ptr raw() noexcept { return value_; }

  SoftFloat& operator+=(const SoftFloat& rhs);
  SoftFloat& operator-=(const SoftFloat& rhs);
  SoftFloat& operator*=(const SoftFloat& rhs);
  SoftFloat& operator/=(const SoftFloat& rhs);

  friend SoftFloat operator+(const SoftFloat& a, const SoftFloat& b);
  friend SoftFloat operator-(const SoftFloat& a, const SoftFloat& b);
  friend SoftFloat operator*(const SoftFloat& a, const SoftFloat& b);
  friend SoftFloat operator/(const SoftFloat& a, const SoftFloat& b);
  friend SoftFloat operator-(const SoftFloat& a);

  friend bool operator==(const SoftFloat& a, const SoftFloat& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
  friend bool operator<(const SoftFloat& a, const SoftFloat& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
  friend bool operator>(const SoftFloat& a, const SoftFloat& b) { return mpfr_greater_p(a.value_, b.value_) != 0; }
  friend bool operator<=(const SoftFloat& a, const SoftFloat& b) { return mpfr_lessequal_p(a.value_, b.value_) != 0; }
  friend bool operator>=(const SoftFloat& a, const SoftFloat& b) { return mpfr_greaterequal_p(a.value_, b.value_) != 0; }

 private:
  mpfr_t value_;
};

// Elementary functions, each correctly rounded at the argument's precision.
SoftFloat sqrt(const SoftFloat& x);
SoftFloat abs(const SoftFloat& x);
SoftFloat exp(const SoftFloat& x);
SoftFloat log(const SoftFloat& x);
SoftFloat sin(const SoftFloat& x);
SoftFloat cos(const SoftFloat& x);
SoftFloat sinh(const SoftFloat& x);
SoftFloat cosh(const SoftFloat& x);
SoftFloat asinh(const SoftFloat& x);
// x * 2^k, exact.
SoftFloat ldexp(const SoftFloat& x, long k);

// Round x to `bits` (ties-to-even).
SoftFloat round_to(const SoftFloat& x, int bits);

enum class ArithOp { add, sub, mul, div, sqrt };

// One elementary operation rounded under ctx. For native contexts the
// operands are narrowed to the hardware format first. `b` is ignored for sqrt.
SoftFloat rounded_arith(ArithOp op, const SoftFloat& a, const SoftFloat& b,
                        const PrecisionContext& ctx);

}  // namespace pir
