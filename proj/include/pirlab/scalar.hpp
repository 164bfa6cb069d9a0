#pragma once

// Generic real/complex scalars over the three backends.
//
// All numerical code is templated on a real type R in {float, double,
// SoftFloat}; RealTraits<R> supplies construction from a context and
// conversion to binary64 for reporting. Complex<R> performs every real
// sub-operation separately (complex multiply = 4 multiplies + 2 adds),
// so each one rounds under the backend's rules.

#include <cmath>
#include <type_traits>

#include "pirlab/precision.hpp"

namespace pir {

template <class R>
struct RealTraits;

template <>
struct RealTraits<float> {
  static float make(double v, const PrecisionContext&) { return static_cast<float>(v); }
  static double to_double(float v) { return v; }
  static bool is_finite(float v) { return std::isfinite(v); }
  static float ldexp(float v, int k) { return std::ldexp(v, k); }
};

template <>
struct RealTraits<double> {
  static double make(double v, const PrecisionContext&) { return v; }
  static double to_double(double v) { return v; }
  static bool is_finite(double v) { return std::isfinite(v); }
  static double ldexp(double v, int k) { return std::ldexp(v, k); }
};

template <>
struct RealTraits<SoftFloat> {
  static SoftFloat make(double v, const PrecisionContext& ctx) { return SoftFloat(v, ctx.bits()); }
  static double to_double(const SoftFloat& v) { return v.to_double(); }
  static bool is_finite(const SoftFloat& v) { return v.is_finite(); }
  static SoftFloat ldexp(const SoftFloat& v, int k) { return pir::ldexp(v, k); }
};

template <class R>
R make_real(double v, const PrecisionContext& ctx) {
  return RealTraits<R>::make(v, ctx);
}

template <class R>
double to_double(const R& v) {
  return RealTraits<R>::to_double(v);
}

// Value of v at the precision of ctx, with a single rounding.
template <class S, class R>
S convert_real(const R& v, const PrecisionContext& ctx) {
  if constexpr (std::is_same_v<S, SoftFloat> && std::is_same_v<R, SoftFloat>) {
    return round_to(v, ctx.bits());
  } else if constexpr (std::is_same_v<S, SoftFloat>) {
    return SoftFloat(static_cast<double>(v), ctx.bits());
  } else if constexpr (std::is_same_v<S, float> && std::is_same_v<R, SoftFloat>) {
    return v.to_float();
  } else {
    return static_cast<S>(to_double(v));
  }
}

// Maps a context onto the C++ real type that executes it.
template <Backend B>
struct BackendReal {
  using type = SoftFloat;
};
template <>
struct BackendReal<Backend::Native32> {
  using type = float;
};
template <>
struct BackendReal<Backend::Native64> {
  using type = double;
};

// Calls fn(R{}) with the real type executing ctx.
template <class Fn>
decltype(auto) dispatch(const PrecisionContext& ctx, Fn&& fn) {
  switch (ctx.backend()) {
    case Backend::Native32: return fn(float{});
    case Backend::Native64: return fn(double{});
    case Backend::Software: break;
  }
  return fn(SoftFloat(ctx.bits()));
}

template <class R>
struct Complex {
  R re;
  R im;

  static Complex make(double re, double im, const PrecisionContext& ctx) {
    return Complex{make_real<R>(re, ctx), make_real<R>(im, ctx)};
  }
  static Complex zero(const PrecisionContext& ctx) { return make(0.0, 0.0, ctx); }

  Complex conj() const { return Complex{re, -im}; }

  friend Complex operator+(const Complex& a, const Complex& b) {
    return Complex{a.re + b.re, a.im + b.im};
  }
  friend Complex operator-(const Complex& a, const Complex& b) {
    return Complex{a.re - b.re, a.im - b.im};
  }
  friend Complex operator-(const Complex& a) { return Complex{-a.re, -a.im}; }
  friend Complex operator*(const Complex& a, const Complex& b) {
    R ac = a.re * b.re;
    R bd = a.im * b.im;
    R ad = a.re * b.im;
    R bc = a.im * b.re;
    return Complex{ac - bd, ad + bc};
  }
  friend Complex operator*(const Complex& a, const R& s) { return Complex{a.re * s, a.im * s}; }
  friend Complex operator/(const Complex& a, const R& s) { return Complex{a.re / s, a.im / s}; }
  friend Complex operator/(const Complex& a, const Complex& b) {
    // (a * conj b) / |b|^2, each step rounded.
    const R d = b.re * b.re + b.im * b.im;
    return (a * b.conj()) / d;
  }

  Complex& operator+=(const Complex& b) { return *this = *this + b; }
  Complex& operator-=(const Complex& b) { return *this = *this - b; }

  // Multiply by i (exact).
  Complex times_i() const { return Complex{-im, re}; }
};

template <class R>
R norm2(const Complex<R>& z) {
  return z.re * z.re + z.im * z.im;
}

template <class R>
R abs(const Complex<R>& z) {
  using std::sqrt;
  return sqrt(norm2(z));
}

// Principal square root, branch-cut stable.
template <class R>
Complex<R> complex_sqrt(const Complex<R>& z, const PrecisionContext& ctx) {
  using std::abs;
  using std::sqrt;
  const R zero = make_real<R>(0.0, ctx);
  const R half = make_real<R>(0.5, ctx);
  if (z.re == zero && z.im == zero) return Complex<R>{zero, zero};
  const R r = pir::abs(z);
  if (z.re >= zero) {
    const R t = sqrt((r + z.re) * half);
    return Complex<R>{t, z.im / (t + t)};
  }
  const R t = sqrt((r - z.re) * half);
  const R re = abs(z.im) / (t + t);
  return Complex<R>{re, z.im < zero ? -t : t};
}

}  // namespace pir
