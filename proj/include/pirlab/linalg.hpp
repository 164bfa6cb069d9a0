#pragma once

// Dense complex linear algebra for small systems at context precision.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "pirlab/scalar.hpp"

namespace pir {

template <class R>
class Vector {
 public:
  Vector(std::size_t n, const PrecisionContext& ctx)
      : ctx_(ctx), data_(n, Complex<R>::zero(ctx)) {}
  Vector(std::vector<Complex<R>> data, const PrecisionContext& ctx)
      : ctx_(ctx), data_(std::move(data)) {}

  static Vector from_values(const std::vector<std::pair<double, double>>& values,
                            const PrecisionContext& ctx) {
    std::vector<Complex<R>> data;
    data.reserve(values.size());
    for (const auto& [re, im] : values) data.push_back(Complex<R>::make(re, im, ctx));
    return Vector(std::move(data), ctx);
  }

  std::size_t size() const { return data_.size(); }
  const PrecisionContext& ctx() const { return ctx_; }
  Complex<R>& operator[](std::size_t i) { return data_[i]; }
  const Complex<R>& operator[](std::size_t i) const { return data_[i]; }

 private:
  PrecisionContext ctx_;
  std::vector<Complex<R>> data_;
};

// <a|b> = sum conj(a_i) b_i
template <class R>
Complex<R> inner(const Vector<R>& a, const Vector<R>& b) {
  Complex<R> s = Complex<R>::zero(a.ctx());
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i].conj() * b[i];
  return s;
}

template <class R>
R norm2(const Vector<R>& v) {
  R s = make_real<R>(0.0, v.ctx());
  for (std::size_t i = 0; i < v.size(); ++i) s = s + norm2(v[i]);
  return s;
}

template <class R>
class Matrix {
 public:
  Matrix(std::size_t n, const PrecisionContext& ctx)
      : n_(n), ctx_(ctx), data_(n * n, Complex<R>::zero(ctx)) {
    if (n == 0) fail(Errc::configuration, "matrix dimension must be positive");
  }

  static Matrix identity(std::size_t n, const PrecisionContext& ctx) {
    Matrix m(n, ctx);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Complex<R>::make(1.0, 0.0, ctx);
    return m;
  }

  // Row-major (re, im) pairs.
  static Matrix from_values(std::size_t n, const std::vector<std::pair<double, double>>& values,
                            const PrecisionContext& ctx) {
    if (values.size() != n * n) fail(Errc::configuration, "matrix entry count mismatch");
    Matrix m(n, ctx);
    for (std::size_t k = 0; k < values.size(); ++k) {
      m.data_[k] = Complex<R>::make(values[k].first, values[k].second, ctx);
    }
    return m;
  }

  std::size_t dim() const { return n_; }
  const PrecisionContext& ctx() const { return ctx_; }
  Complex<R>& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  const Complex<R>& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  Matrix adjoint() const {
    Matrix r(n_, ctx_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) r(i, j) = (*this)(j, i).conj();
    return r;
  }

  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    Matrix r(a.n_, a.ctx_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] + b.data_[k];
    return r;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    Matrix r(a.n_, a.ctx_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] - b.data_[k];
    return r;
  }
  friend Matrix operator-(const Matrix& a) {
    Matrix r(a.n_, a.ctx_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = -a.data_[k];
    return r;
  }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    Matrix r(a.n_, a.ctx_);
    for (std::size_t i = 0; i < a.n_; ++i) {
      for (std::size_t j = 0; j < a.n_; ++j) {
        Complex<R> s = a(i, 0) * b(0, j);
        for (std::size_t k = 1; k < a.n_; ++k) s += a(i, k) * b(k, j);
        r(i, j) = s;
      }
    }
    return r;
  }
  friend Matrix operator*(const Matrix& a, const Complex<R>& s) {
    Matrix r(a.n_, a.ctx_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] * s;
    return r;
  }
  friend Matrix operator*(const Matrix& a, const R& s) {
    Matrix r(a.n_, a.ctx_);
    for (std::size_t k = 0; k < a.data_.size(); ++k) r.data_[k] = a.data_[k] * s;
    return r;
  }
  friend Vector<R> operator*(const Matrix& a, const Vector<R>& v) {
    Vector<R> r(a.n_, a.ctx_);
    for (std::size_t i = 0; i < a.n_; ++i) {
      Complex<R> s = a(i, 0) * v[0];
      for (std::size_t k = 1; k < a.n_; ++k) s += a(i, k) * v[k];
      r[i] = s;
    }
    return r;
  }

  // Re-express every entry in another real type / context (rounding once).
  template <class S>
  Matrix<S> convert(const PrecisionContext& ctx) const {
    Matrix<S> r(n_, ctx);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        r(i, j) = Complex<S>{convert_real<S>((*this)(i, j).re, ctx), convert_real<S>((*this)(i, j).im, ctx)};
    return r;
  }

 private:
  std::size_t n_;
  PrecisionContext ctx_;
  std::vector<Complex<R>> data_;
};

// Max absolute column sum, evaluated in binary64 (used for step selection).
template <class R>
double norm1_estimate(const Matrix<R>& a) {
  double best = 0.0;
  for (std::size_t j = 0; j < a.dim(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::hypot(to_double(a(i, j).re), to_double(a(i, j).im));
    best = std::max(best, s);
  }
  return best;
}

// Solves A X = B by Gaussian elimination with partial pivoting.
template <class R>
Matrix<R> solve(Matrix<R> a, Matrix<R> b) {
  const std::size_t n = a.dim();
  const R zero = make_real<R>(0.0, a.ctx());
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    R best = norm2(a(col, col));
    for (std::size_t r = col + 1; r < n; ++r) {
      R cand = norm2(a(r, col));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    if (best == zero) fail(Errc::conditioning, "singular matrix in solve");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(col, j), a(piv, j));
        std::swap(b(col, j), b(piv, j));
      }
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex<R> f = a(r, col) / a(col, col);
      for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
      for (std::size_t j = 0; j < n; ++j) b(r, j) -= f * b(col, j);
    }
  }
  for (std::size_t ri = n; ri-- > 0;) {
    for (std::size_t j = 0; j < n; ++j) {
      Complex<R> s = b(ri, j);
      for (std::size_t k = ri + 1; k < n; ++k) s -= a(ri, k) * b(k, j);
      b(ri, j) = s / a(ri, ri);
    }
  }
  return b;
}

template <class R>
Complex<R> determinant_2x2(const Matrix<R>& m) {
  return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

// ---------------------------------------------------------------------------
// Singular values

template <class R>
struct SvdResult {
  R sigma_max;
  R sigma_min;
  bool floor_applied = false;

  double log_kappa() const {
    using std::log;
    return to_double(log(sigma_max / sigma_min));
  }
  double kappa() const { return to_double(sigma_max / sigma_min); }
};

// Default floor: beta^-(2m) of the matrix context.
template <class R>
R default_svd_floor(const PrecisionContext& ctx) {
  return RealTraits<R>::ldexp(make_real<R>(1.0, ctx), -2 * ctx.effective_bits());
}

// Closed form on M^dagger M = [[p, r], [conj r, q]]:
//   mu_max = (p + q + sqrt((p - q)^2 + 4|r|^2)) / 2,  mu_min = |det M|^2 / mu_max.
// Both are sums of non-negative terms, so no cancellation at large dynamic range.
template <class R>
SvdResult<R> svd_2x2(const Matrix<R>& m, const R& floor) {
  using std::sqrt;
  if (m.dim() != 2) fail(Errc::configuration, "svd_2x2 requires a 2x2 matrix");
  const auto& ctx = m.ctx();
  const R p = norm2(m(0, 0)) + norm2(m(1, 0));
  const R q = norm2(m(0, 1)) + norm2(m(1, 1));
  const Complex<R> r = m(0, 0).conj() * m(0, 1) + m(1, 0).conj() * m(1, 1);
  const R diff = p - q;
  const R four = make_real<R>(4.0, ctx);
  const R half = make_real<R>(0.5, ctx);
  const R mu_max = (p + q + sqrt(diff * diff + four * norm2(r))) * half;
  const R zero = make_real<R>(0.0, ctx);
  SvdResult<R> out{zero, zero, false};
  if (mu_max == zero) {
    out.sigma_min = floor;
    out.floor_applied = true;
    return out;
  }
  const R det_abs2 = norm2(determinant_2x2(m));
  out.sigma_max = sqrt(mu_max);
  out.sigma_min = sqrt(det_abs2 / mu_max);
  if (out.sigma_min < floor) {
    out.sigma_min = floor;
    out.floor_applied = true;
  }
  return out;
}

template <class R>
SvdResult<R> svd_2x2(const Matrix<R>& m) {
  return svd_2x2(m, default_svd_floor<R>(m.ctx()));
}

// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
// returned in ascending order.
template <class R>
std::vector<R> hermitian_eigenvalues(Matrix<R> a, int max_sweeps = 64) {
  using std::sqrt;
  const std::size_t n = a.dim();
  const auto& ctx = a.ctx();
  const R zero = make_real<R>(0.0, ctx);
  const R one = make_real<R>(1.0, ctx);
  const double eps = ctx.epsilon();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0, diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += to_double(norm2(a(i, i)));
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) off += to_double(norm2(a(i, j)));
    }
    if (off == 0.0 || off <= eps * eps * diag) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const Complex<R> apq = a(p, q);
        const R mag = pir::abs(apq);
        if (mag == zero) continue;
        // Unit phase so that conj(phase)*apq is real positive.
        const Complex<R> phase{apq.re / mag, apq.im / mag};
        const R app = a(p, p).re;
        const R aqq = a(q, q).re;
        // Real symmetric rotation on [[app, mag], [mag, aqq]].
        const R theta = (aqq - app) / (mag + mag);
        const R sgn = theta < zero ? -one : one;
        const R t = sgn / (theta * sgn + sqrt(theta * theta + one));
        const R c = one / sqrt(t * t + one);
        const R s = t * c;
        // A <- G^dagger A G with G = [[c, s phase], [-s conj(phase), c]].
        const Complex<R> sp = phase * s;                 // s * phase
        const Complex<R> spc = phase.conj() * s;         // s * conj(phase)
        for (std::size_t k = 0; k < n; ++k) {
          const Complex<R> akp = a(k, p);
          const Complex<R> akq = a(k, q);
          a(k, p) = akp * c - akq * spc;
          a(k, q) = akp * sp + akq * c;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const Complex<R> apk = a(p, k);
          const Complex<R> aqk = a(q, k);
          a(p, k) = apk * c - aqk * sp;
          a(q, k) = apk * spc + aqk * c;
        }
        a(p, q) = Complex<R>::zero(ctx);
        a(q, p) = Complex<R>::zero(ctx);
      }
    }
  }
  std::vector<R> ev;
  ev.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ev.push_back(a(i, i).re);
  std::sort(ev.begin(), ev.end(), [](const R& x, const R& y) { return x < y; });
  return ev;
}

// Extreme singular values of an n x n matrix (closed form when n == 2).
template <class R>
SvdResult<R> singular_value_extremes(const Matrix<R>& m, const R& floor) {
  using std::sqrt;
  if (m.dim() == 2) return svd_2x2(m, floor);
  const R zero = make_real<R>(0.0, m.ctx());
  auto ev = hermitian_eigenvalues(m.adjoint() * m);
  R lo = ev.front() < zero ? zero : ev.front();
  SvdResult<R> out{sqrt(ev.back()), sqrt(lo), false};
  if (out.sigma_min < floor) {
    out.sigma_min = floor;
    out.floor_applied = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigendecomposition (2 x 2)

template <class R>
struct EigResult {
  // Ordered by decreasing imaginary part, then decreasing real part:
  // index 0 is the mode amplified by exp(-i H t).
  std::vector<Complex<R>> eigenvalues;
  Matrix<R> v;
  Matrix<R> v_inv;
};

namespace detail {

template <class R>
bool eig_order_before(const Complex<R>& a, const Complex<R>& b) {
  if (a.im > b.im) return true;
  if (b.im > a.im) return false;
  return a.re > b.re;
}

// Unit 2-norm, largest-magnitude component real positive.
template <class R>
void normalize_column(Complex<R>& x0, Complex<R>& x1) {
  using std::sqrt;
  const R n0 = norm2(x0);
  const R n1 = norm2(x1);
  const Complex<R>& big = n0 >= n1 ? x0 : x1;
  const R big_abs = sqrt(n0 >= n1 ? n0 : n1);
  const Complex<R> phase{big.re / big_abs, -big.im / big_abs};  // conj(big)/|big|
  const R len = sqrt(n0 + n1);
  x0 = (x0 * phase) / len;
  x1 = (x1 * phase) / len;
  // Force the leading entry to be exactly real.
  if (n0 >= n1) {
    x0.im = x0.im - x0.im;
  } else {
    x1.im = x1.im - x1.im;
  }
}

}  // namespace detail

template <class R>
EigResult<R> eig_2x2(const Matrix<R>& h) {
  if (h.dim() != 2) fail(Errc::configuration, "eig_2x2 requires a 2x2 matrix");
  const auto& ctx = h.ctx();
  const R half = make_real<R>(0.5, ctx);
  const Complex<R>& a = h(0, 0);
  const Complex<R>& b = h(0, 1);
  const Complex<R>& c = h(1, 0);
  const Complex<R>& d = h(1, 1);
  const Complex<R> mean = (a + d) * half;
  const Complex<R> hd = (a - d) * half;
  const Complex<R> bc = b * c;
  const Complex<R> disc = hd * hd + bc;
  const double scale = to_double(norm2(hd)) + to_double(pir::abs(bc));
  const double disc_abs = to_double(pir::abs(disc));
  if (disc_abs <= ctx.epsilon() * scale || (scale == 0.0 && disc_abs == 0.0)) {
    // Either defective (exceptional point) or a multiple of the identity.
    const bool scalar = to_double(norm2(b)) == 0.0 && to_double(norm2(c)) == 0.0;
    if (!scalar) fail(Errc::exceptional_point, "defective 2x2 matrix (discriminant vanishes)");
  }
  const Complex<R> root = complex_sqrt(disc, ctx);
  std::vector<Complex<R>> lambda{mean + root, mean - root};
  if (detail::eig_order_before(lambda[1], lambda[0])) std::swap(lambda[0], lambda[1]);

  Matrix<R> v(2, ctx);
  for (std::size_t k = 0; k < 2; ++k) {
    // Null vector of (H - lambda I): (b, lambda - a) or (lambda - d, c).
    Complex<R> u0 = b;
    Complex<R> u1 = lambda[k] - a;
    Complex<R> w0 = lambda[k] - d;
    Complex<R> w1 = c;
    const double nu = to_double(norm2(u0)) + to_double(norm2(u1));
    const double nw = to_double(norm2(w0)) + to_double(norm2(w1));
    Complex<R> x0 = nu >= nw ? u0 : w0;
    Complex<R> x1 = nu >= nw ? u1 : w1;
    if (std::max(nu, nw) == 0.0) {
      // H is a multiple of the identity: canonical basis.
      x0 = Complex<R>::make(k == 0 ? 1.0 : 0.0, 0.0, ctx);
      x1 = Complex<R>::make(k == 0 ? 0.0 : 1.0, 0.0, ctx);
    }
    detail::normalize_column(x0, x1);
    v(0, k) = x0;
    v(1, k) = x1;
  }
  const Complex<R> det = determinant_2x2(v);
  if (to_double(norm2(det)) == 0.0) fail(Errc::exceptional_point, "eigenvectors coalesce");
  Matrix<R> v_inv(2, ctx);
  v_inv(0, 0) = v(1, 1) / det;
  v_inv(0, 1) = -v(0, 1) / det;
  v_inv(1, 0) = -v(1, 0) / det;
  v_inv(1, 1) = v(0, 0) / det;
  return EigResult<R>{std::move(lambda), std::move(v), std::move(v_inv)};
}

// kappa(V) = ||V|| ||V^-1|| in the spectral norm.
template <class R>
double eigenvector_condition(const EigResult<R>& eig) {
  const auto s = svd_2x2(eig.v, make_real<R>(0.0, eig.v.ctx()));
  return s.kappa();
}

// ---------------------------------------------------------------------------
// Propagators U(t) = exp(-i H t)

enum class PropagatorRoute { ClosedForm, Eigen, Series };

const char* to_string(PropagatorRoute route) noexcept;
PropagatorRoute route_from_string(const std::string& name);

// Cayley-Hamilton form for a traceless 2x2 generator with H^2 = -det(H) I:
//   broken    (det H = eta^2 > 0):  U = cosh(eta t) I - (i/eta) sinh(eta t) H
//   unbroken  (det H = -w^2 < 0):   U = cos(w t) I - (i/w) sin(w t) H
// Requires det H real (true for the dimer family).
template <class R>
Matrix<R> propagator_closed_form(const Matrix<R>& h, double t) {
  using std::abs;
  using std::cos;
  using std::cosh;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  if (h.dim() != 2) fail(Errc::configuration, "closed-form propagator requires a 2x2 generator");
  const auto& ctx = h.ctx();
  const double trace = to_double(pir::abs(h(0, 0) + h(1, 1)));
  const double scale = to_double(pir::abs(h(0, 0))) + to_double(pir::abs(h(1, 1)));
  if (trace > 4.0 * ctx.epsilon() * scale) {
    fail(Errc::configuration, "closed-form propagator requires a traceless generator");
  }
  const Complex<R> det = determinant_2x2(h);
  const double mix = to_double(norm2(h(0, 0))) + to_double(pir::abs(h(0, 1) * h(1, 0)));
  if (to_double(pir::abs(det)) <= ctx.epsilon() * mix) {
    fail(Errc::exceptional_point, "generator at the exceptional point (eta -> 0)");
  }
  const R zero = make_real<R>(0.0, ctx);
  const R tt = make_real<R>(t, ctx);
  R diag_coef = zero;  // cosh / cos
  R gen_coef = zero;   // sinh(eta t)/eta, sin(w t)/w
  if (det.re > zero) {
    const R eta = sqrt(det.re);
    const R arg = eta * tt;
    diag_coef = cosh(arg);
    gen_coef = sinh(arg) / eta;
  } else {
    const R w = sqrt(-det.re);
    const R arg = w * tt;
    diag_coef = cos(arg);
    gen_coef = sin(arg) / w;
  }
  // U = diag_coef I - i gen_coef H
  Matrix<R> u(2, ctx);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const Complex<R> scaled = h(i, j) * gen_coef;
      Complex<R> e{scaled.im, -scaled.re};  // -i * scaled
      if (i == j) e.re = diag_coef + e.re;
      u(i, j) = e;
    }
  }
  return u;
}

// V exp(-i Lambda t) V^-1 from eig_2x2.
template <class R>
Matrix<R> propagator_eigendecomp(const Matrix<R>& h, double t) {
  using std::cos;
  using std::exp;
  using std::sin;
  const auto& ctx = h.ctx();
  const EigResult<R> eig = eig_2x2(h);
  const double kv = eigenvector_condition(eig);
  if (!(kv < 1.0 / ctx.epsilon())) {
    fail(Errc::conditioning, "eigenvector matrix too ill-conditioned at this precision");
  }
  const R tt = make_real<R>(t, ctx);
  Matrix<R> d(2, ctx);
  for (std::size_t k = 0; k < 2; ++k) {
    // exp(-i (a + i b) t) = exp(b t) (cos(a t) - i sin(a t))
    const R mag = exp(eig.eigenvalues[k].im * tt);
    const R ang = eig.eigenvalues[k].re * tt;
    d(k, k) = Complex<R>{mag * cos(ang), -(mag * sin(ang))};
  }
  return eig.v * d * eig.v_inv;
}

namespace detail {

// log of the [13/13] Pade truncation constant (13!)^2 / (26! 27!).
inline double log_pade13_constant() {
  return 2.0 * std::lgamma(14.0) - std::lgamma(27.0) - std::lgamma(28.0);
}

// Squarings needed so that the [13/13] truncation bound for ||A / 2^s|| stays
// below the context's eps.
inline int pade13_squarings(double norm_a, int bits) {
  if (norm_a == 0.0) return 0;
  const double log_theta = (-bits * std::log(2.0) - log_pade13_constant()) / 27.0;
  const double s = std::ceil((std::log(norm_a) - log_theta) / std::log(2.0));
  return s > 0.0 ? static_cast<int>(s) : 0;
}

}  // namespace detail

// Scaling and squaring with the fixed [13/13] diagonal Pade approximant.
template <class R>
Matrix<R> propagator_series(const Matrix<R>& h, double t) {
  const auto& ctx = h.ctx();
  const std::size_t n = h.dim();
  const R tt = make_real<R>(t, ctx);
  // A = -i H t
  Matrix<R> a(n, ctx);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Complex<R> x = h(i, j) * tt;
      a(i, j) = Complex<R>{x.im, -x.re};
    }
  }
  const int s = detail::pade13_squarings(norm1_estimate(a), ctx.effective_bits());
  if (s > 0) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a(i, j) = Complex<R>{RealTraits<R>::ldexp(a(i, j).re, -s), RealTraits<R>::ldexp(a(i, j).im, -s)};
  }
  // Normalized coefficients c_0 = 1, c_{j+1} = c_j (q - j) / ((2q - j)(j + 1)).
  constexpr int q = 13;
  std::vector<R> c;
  c.reserve(q + 1);
  c.push_back(make_real<R>(1.0, ctx));
  for (int j = 0; j < q; ++j) {
    const R num = make_real<R>(static_cast<double>(q - j), ctx);
    const R den = make_real<R>(static_cast<double>((2 * q - j) * (j + 1)), ctx);
    c.push_back(c.back() * num / den);
  }
  const Matrix<R> id = Matrix<R>::identity(n, ctx);
  const Matrix<R> a2 = a * a;
  const Matrix<R> a4 = a2 * a2;
  const Matrix<R> a6 = a4 * a2;
  const Matrix<R> odd_inner =
      a6 * (a6 * c[13] + a4 * c[11] + a2 * c[9]) + a6 * c[7] + a4 * c[5] + a2 * c[3] + id * c[1];
  const Matrix<R> odd = a * odd_inner;
  const Matrix<R> even =
      a6 * (a6 * c[12] + a4 * c[10] + a2 * c[8]) + a6 * c[6] + a4 * c[4] + a2 * c[2] + id * c[0];
  Matrix<R> u = solve(even - odd, even + odd);
  for (int k = 0; k < s; ++k) u = u * u;
  return u;
}

template <class R>
Matrix<R> propagator(PropagatorRoute route, const Matrix<R>& h, double t) {
  switch (route) {
    case PropagatorRoute::ClosedForm: return propagator_closed_form(h, t);
    case PropagatorRoute::Eigen: return propagator_eigendecomp(h, t);
    case PropagatorRoute::Series: return propagator_series(h, t);
  }
  fail(Errc::internal, "unknown propagator route");
}

}  // namespace pir
