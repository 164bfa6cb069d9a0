#include "pirlab/precision.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pir {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::configuration: return "configuration error";
    case Errc::arithmetic: return "arithmetic error";
    case Errc::domain: return "domain error";
    case Errc::phase: return "phase error";
    case Errc::exceptional_point: return "exceptional-point error";
    case Errc::conditioning: return "conditioning error";
    case Errc::fit: return "fit error";
    case Errc::comparison: return "comparison error";
    case Errc::io: return "I/O error";
    case Errc::internal: return "internal error";
  }
  return "error";
}

const char* to_string(Backend backend) noexcept {
  switch (backend) {
    case Backend::Software: return "software";
    case Backend::Native32: return "native32";
    case Backend::Native64: return "native64";
  }
  return "?";
}

Backend backend_from_string(const std::string& name) {
  if (name == "software" || name == "mp") return Backend::Software;
  if (name == "native32" || name == "float32") return Backend::Native32;
  if (name == "native64" || name == "float64") return Backend::Native64;
  fail(Errc::configuration, "unknown backend '" + name + "'");
}

PrecisionContext PrecisionContext::software(int bits) {
  if (bits < kMinSoftwareBits || bits > kMaxSoftwareBits) {
    fail(Errc::configuration, "software precision must lie in [2, 256] bits, got " +
                                  std::to_string(bits));
  }
  return PrecisionContext(Backend::Software, bits);
}

PrecisionContext PrecisionContext::create(Backend backend, int bits) {
  switch (backend) {
    case Backend::Software: return software(bits);
    case Backend::Native32: return native32();
    case Backend::Native64: return native64();
  }
  fail(Errc::configuration, "invalid backend");
}

double PrecisionContext::epsilon() const noexcept { return std::ldexp(1.0, -bits_); }

int PrecisionContext::decimal_digits() const noexcept {
  // ceil(m / log2 10) is the smallest d with 10^d >= 2^m, i.e. with
  // bit_length(10^d) > m. Exact integer search, no floating-point log.
  int d = 0;
  std::vector<std::uint32_t> pow10{1};  // little-endian base-2^32 digits of 10^d
  auto bit_length = [&]() {
    int len = static_cast<int>(pow10.size() - 1) * 32;
    for (std::uint32_t t = pow10.back(); t != 0; t >>= 1) ++len;
    return len;
  };
  while (bit_length() <= bits_) {
    std::uint64_t carry = 0;
    for (auto& w : pow10) {
      const std::uint64_t v = static_cast<std::uint64_t>(w) * 10u + carry;
      w = static_cast<std::uint32_t>(v);
      carry = v >> 32;
    }
    if (carry != 0) pow10.push_back(static_cast<std::uint32_t>(carry));
    ++d;
  }
  return d;
}

int PrecisionContext::effective_bits() const noexcept {
  return backend_ == Backend::Native32 ? 24 : bits_;
}

std::string PrecisionContext::label() const {
  if (backend_ == Backend::Software) return "software(" + std::to_string(bits_) + ")";
  return to_string(backend_);
}

double bits_from_dynamic_range_db(double dynamic_range_db) {
  if (!(dynamic_range_db >= 0.0)) {
    fail(Errc::domain, "dynamic range must be non-negative");
  }
  return dynamic_range_db / (20.0 * std::log10(2.0));
}

// ---------------------------------------------------------------------------
// SoftFloat

namespace {

mpfr_prec_t checked_prec(int bits) {
  if (bits < MPFR_PREC_MIN + 1 || bits > 4096) {
    fail(Errc::configuration, "invalid significand width " + std::to_string(bits));
  }
  return static_cast<mpfr_prec_t>(bits);
}

int wider(const SoftFloat& a, const SoftFloat& b) {
  return std::max(a.precision(), b.precision());
}

}  // namespace

SoftFloat::SoftFloat(int bits) {
  mpfr_init2(value_, checked_prec(bits));
  mpfr_set_zero(value_, 1);
}

SoftFloat::SoftFloat(double value, int bits) {
  mpfr_init2(value_, checked_prec(bits));
  mpfr_set_d(value_, value, MPFR_RNDN);
}

SoftFloat::SoftFloat(const SoftFloat& other) {
  mpfr_init2(value_, mpfr_get_prec(other.value_));
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

SoftFloat::SoftFloat(SoftFloat&& other) noexcept {
  // Steal the limbs; leave `other` as a valid 2-bit zero.
  *value_ = *other.value_;
  mpfr_init2(other.value_, 2);
  mpfr_set_zero(other.value_, 1);
}

SoftFloat& SoftFloat::operator=(const SoftFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, mpfr_get_prec(other.value_));
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

SoftFloat& SoftFloat::operator=(SoftFloat&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

SoftFloat::~SoftFloat() { mpfr_clear(value_); }

SoftFloat SoftFloat::from_scaled(std::int64_t mantissa, long exp2, int bits) {
  SoftFloat r(bits);
  mpfr_set_sj_2exp(r.value_, mantissa, exp2, MPFR_RNDN);
  return r;
}

SoftFloat SoftFloat::from_string(const std::string& text, int bits) {
  SoftFloat r(bits);
  if (mpfr_set_str(r.value_, text.c_str(), 10, MPFR_RNDN) != 0 && !r.is_finite()) {
    fail(Errc::configuration, "not a number: '" + text + "'");
  }
  return r;
}

std::string SoftFloat::to_string(int digits) const {
  if (digits <= 0) digits = static_cast<int>(std::ceil(precision() * 0.30102999566398120)) + 1;
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Rg", digits, value_);
  return std::string(buf.data());
}

SoftFloat& SoftFloat::operator+=(const SoftFloat& rhs) { return *this = *this + rhs; }
SoftFloat& SoftFloat::operator-=(const SoftFloat& rhs) { return *this = *this - rhs; }
SoftFloat& SoftFloat::operator*=(const SoftFloat& rhs) { return *this = *this * rhs; }
SoftFloat& SoftFloat::operator/=(const SoftFloat& rhs) { return *this = *this / rhs; }

SoftFloat operator+(const SoftFloat& a, const SoftFloat& b) {
  SoftFloat r(wider(a, b));
  mpfr_add(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

SoftFloat operator-(const SoftFloat& a, const SoftFloat& b) {
  SoftFloat r(wider(a, b));
  mpfr_sub(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

SoftFloat operator*(const SoftFloat& a, const SoftFloat& b) {
  SoftFloat r(wider(a, b));
  mpfr_mul(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

SoftFloat operator/(const SoftFloat& a, const SoftFloat& b) {
  if (b.is_zero()) fail(Errc::arithmetic, "division by zero");
  SoftFloat r(wider(a, b));
  mpfr_div(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

SoftFloat operator-(const SoftFloat& a) {
  SoftFloat r(a.precision());
  mpfr_neg(r.value_, a.value_, MPFR_RNDN);
  return r;
}

namespace {

using UnaryFn = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t);

SoftFloat apply(UnaryFn fn, const SoftFloat& x) {
  SoftFloat r(x.precision());
  fn(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

}  // namespace

SoftFloat sqrt(const SoftFloat& x) {
  if (x.sign() < 0) fail(Errc::domain, "square root of a negative number");
  return apply(mpfr_sqrt, x);
}
SoftFloat abs(const SoftFloat& x) { return apply(mpfr_abs, x); }
SoftFloat exp(const SoftFloat& x) { return apply(mpfr_exp, x); }
SoftFloat log(const SoftFloat& x) {
  if (x.sign() <= 0) fail(Errc::domain, "logarithm of a non-positive number");
  return apply(mpfr_log, x);
}
SoftFloat sin(const SoftFloat& x) { return apply(mpfr_sin, x); }
SoftFloat cos(const SoftFloat& x) { return apply(mpfr_cos, x); }
SoftFloat sinh(const SoftFloat& x) { return apply(mpfr_sinh, x); }
SoftFloat cosh(const SoftFloat& x) { return apply(mpfr_cosh, x); }
SoftFloat asinh(const SoftFloat& x) { return apply(mpfr_asinh, x); }

SoftFloat ldexp(const SoftFloat& x, long k) {
  SoftFloat r(x.precision());
  mpfr_mul_2si(r.raw(), x.raw(), k, MPFR_RNDN);
  return r;
}

SoftFloat round_to(const SoftFloat& x, int bits) {
  SoftFloat r(bits);
  mpfr_set(r.raw(), x.raw(), MPFR_RNDN);
  return r;
}

namespace {

template <class T>
T native_op(ArithOp op, T a, T b) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div:
      if (b == T(0)) fail(Errc::arithmetic, "division by zero");
      return a / b;
    case ArithOp::sqrt:
      if (a < T(0)) fail(Errc::domain, "square root of a negative number");
      return std::sqrt(a);
  }
  fail(Errc::internal, "unknown arithmetic op");
}

}  // namespace

SoftFloat rounded_arith(ArithOp op, const SoftFloat& a, const SoftFloat& b,
                        const PrecisionContext& ctx) {
  switch (ctx.backend()) {
    case Backend::Native32: {
      const float r = native_op<float>(op, a.to_float(), b.to_float());
      return SoftFloat(static_cast<double>(r), 24);
    }
    case Backend::Native64: {
      const double r = native_op<double>(op, a.to_double(), b.to_double());
      return SoftFloat(r, 53);
    }
    case Backend::Software: break;
  }
  const int bits = ctx.bits();
  SoftFloat r(bits);
  switch (op) {
    case ArithOp::add: mpfr_add(r.raw(), a.raw(), b.raw(), MPFR_RNDN); break;
    case ArithOp::sub: mpfr_sub(r.raw(), a.raw(), b.raw(), MPFR_RNDN); break;
    case ArithOp::mul: mpfr_mul(r.raw(), a.raw(), b.raw(), MPFR_RNDN); break;
    case ArithOp::div:
      if (b.is_zero()) fail(Errc::arithmetic, "division by zero");
      mpfr_div(r.raw(), a.raw(), b.raw(), MPFR_RNDN);
      break;
    case ArithOp::sqrt:
      if (a.sign() < 0) fail(Errc::domain, "square root of a negative number");
      mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
      break;
  }
  return r;
}

}  // namespace pir
