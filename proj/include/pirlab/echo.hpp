#pragma once

// Forward/backward echo experiments at a chosen precision.
//
// A forward leg applies U(dt_frac) U(dt)^N to psi0; the backward leg applies
// the propagators of -H built by the same route. Amplitudes are never
// renormalized between steps.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "pirlab/linalg.hpp"
#include "pirlab/model.hpp"

namespace pir {

struct SteppingPlan {
  double tau = 0.0;
  double dt = 0.4;
  long n_full = 0;
  double dt_frac = 0.0;
};

// tau = n_full * dt + dt_frac with 0 <= dt_frac < dt. A ratio tau/dt within
// 1e-9 of an integer is treated as an exact multiple.
SteppingPlan plan_steps(double tau, double dt);

enum class Direction { Forward, Backward };

// Dense generator or observable, stored exactly in binary64 and rebuilt at
// any precision on demand.
struct MatrixSpec {
  std::size_t n = 2;
  std::vector<std::pair<double, double>> entries;  // row-major (re, im)

  static MatrixSpec from_dimer(const DimerSpec& spec);
  static MatrixSpec diagonal(const std::vector<std::pair<double, double>>& d);
  static MatrixSpec real_diagonal(const std::vector<double>& d);

  template <class R>
  Matrix<R> build(const PrecisionContext& ctx) const {
    return Matrix<R>::from_values(n, entries, ctx);
  }
};

// U(dt) and its backward counterpart, computed once and reused for every
// full step.
template <class R>
class Stepper {
 public:
  Stepper(const Matrix<R>& h, double dt, PropagatorRoute route)
      : h_(h),
        minus_h_(-h),
        dt_(dt),
        route_(route),
        forward_(propagator(route, h, dt)),
        backward_(propagator(route, minus_h_, dt)) {}

  double dt() const { return dt_; }
  const Matrix<R>& forward_step() const { return forward_; }
  const Matrix<R>& backward_step() const { return backward_; }

  Vector<R> evolve(Vector<R> psi, const SteppingPlan& plan, Direction dir) const {
    if (plan.dt != dt_) fail(Errc::configuration, "plan step differs from the stepper's dt");
    const Matrix<R>& step = dir == Direction::Forward ? forward_ : backward_;
    for (long k = 0; k < plan.n_full; ++k) psi = checked(step * psi);
    if (plan.dt_frac > 0.0) {
      const Matrix<R>& gen = dir == Direction::Forward ? h_ : minus_h_;
      psi = checked(propagator(route_, gen, plan.dt_frac) * psi);
    }
    return psi;
  }

 private:
  static Vector<R> checked(Vector<R> v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!RealTraits<R>::is_finite(v[i].re) || !RealTraits<R>::is_finite(v[i].im)) {
        fail(Errc::internal, "non-finite amplitude during evolution");
      }
    }
    return v;
  }

  Matrix<R> h_;
  Matrix<R> minus_h_;
  double dt_;
  PropagatorRoute route_;
  Matrix<R> forward_;
  Matrix<R> backward_;
};

template <class R>
Vector<R> stepped_evolve(const Vector<R>& psi0, const Matrix<R>& h, const SteppingPlan& plan,
                         Direction dir, PropagatorRoute route = PropagatorRoute::Series) {
  if (psi0.size() != h.dim()) fail(Errc::configuration, "state and generator dimensions differ");
  if (to_double(norm2(psi0)) == 0.0) fail(Errc::domain, "initial state is zero");
  return Stepper<R>(h, plan.dt, route).evolve(psi0, plan, dir);
}

template <class R>
Vector<R> normalized(const Vector<R>& v) {
  using std::sqrt;
  const R n = sqrt(norm2(v));
  if (to_double(n) == 0.0) fail(Errc::domain, "cannot normalize a zero vector");
  Vector<R> out(v.size(), v.ctx());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return out;
}

struct Fidelity {
  double value;       // F
  double infidelity;  // 1 - F, evaluated at working precision
};

// F = |<psi0|psi>|^2 / (<psi0|psi0> <psi|psi>)
template <class R>
Fidelity loschmidt(const Vector<R>& psi0, const Vector<R>& psi) {
  const R n0 = norm2(psi0);
  const R n1 = norm2(psi);
  const R zero = make_real<R>(0.0, psi0.ctx());
  if (n0 == zero || n1 == zero) fail(Errc::domain, "fidelity of a zero-norm state");
  const R overlap = norm2(inner(psi0, psi));
  const R den = n0 * n1;
  R gap = den - overlap;
  if (gap < zero) gap = zero;
  return Fidelity{to_double(overlap / den), to_double(gap / den)};
}

template <class R>
double loschmidt_fidelity(const Vector<R>& psi0, const Vector<R>& psi) {
  return loschmidt(psi0, psi).value;
}

template <class R>
class ReadoutSpec {
 public:
  explicit ReadoutSpec(Matrix<R> h0) : h0_(std::move(h0)), e_min_(make_real<R>(0.0, h0_.ctx())) {
    const auto& h = h0_;
    for (std::size_t i = 0; i < h.dim(); ++i)
      for (std::size_t j = 0; j < h.dim(); ++j)
        if (!(h(i, j).re == h(j, i).re) || !(h(i, j).im == -h(j, i).im)) {
          fail(Errc::configuration, "readout Hamiltonian must be Hermitian");
        }
    e_min_ = h.dim() == 1 ? h(0, 0).re : hermitian_eigenvalues(h0_).front();
  }

  const Matrix<R>& h0() const { return h0_; }
  const R& e_min() const { return e_min_; }

 private:
  Matrix<R> h0_;
  R e_min_;
};

// W = <psi|H0|psi>/<psi|psi> - E_min, clamped at 0 against rounding.
template <class R>
double work_value(const Vector<R>& psi, const ReadoutSpec<R>& readout) {
  const R n = norm2(psi);
  const R zero = make_real<R>(0.0, psi.ctx());
  if (n == zero) fail(Errc::domain, "work of a zero-norm state");
  const Complex<R> e = inner(psi, readout.h0() * psi);
  R w = e.re / n - readout.e_min();
  if (w < zero) w = zero;
  return to_double(w);
}

// eta_W = W_rec / W_out; Errc::domain when W_out = 0.
double work_echo_ratio(double w_out, double w_rec);

struct EchoSample {
  double tau = 0.0;
  double fidelity = 0.0;
  double infidelity = 0.0;
  double w_out = 0.0;
  double w_rec = 0.0;
  std::optional<double> eta_w;
  double norm_out = 0.0;
  double norm_rec = 0.0;
  double ln_kappa = 0.0;
};

struct EchoCurve {
  std::vector<EchoSample> samples;
};

struct EchoSetup {
  MatrixSpec hamiltonian = MatrixSpec::from_dimer(DimerSpec{});
  std::vector<std::pair<double, double>> psi0{{1.0, 0.0}, {0.01, 0.0}};
  MatrixSpec readout = MatrixSpec::real_diagonal({2.0, -2.0});
  double dt = 0.4;
  std::vector<double> taus;
  PropagatorRoute route = PropagatorRoute::ClosedForm;
  bool attach_log_kappa = true;
  unsigned threads = 1;
};

// tau_0 = start, start + step, ... <= stop (inclusive within 1e-9 step).
std::vector<double> tau_grid(double start, double stop, double step);

// Deterministic parallel map; results land in index order.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const unsigned n = std::min<std::size_t>(threads, count);
  pool.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += n) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

template <class R>
EchoCurve echo_curve(const EchoSetup& setup, const PrecisionContext& ctx) {
  using std::sqrt;
  for (std::size_t i = 1; i < setup.taus.size(); ++i) {
    if (!(setup.taus[i] > setup.taus[i - 1])) fail(Errc::configuration, "tau grid must be increasing");
  }
  if (!(setup.dt > 0.0)) fail(Errc::configuration, "time step must be positive");
  const Matrix<R> h = setup.hamiltonian.build<R>(ctx);
  if (setup.psi0.size() != h.dim()) fail(Errc::configuration, "initial state dimension mismatch");
  const Vector<R> psi0 = normalized(Vector<R>::from_values(setup.psi0, ctx));
  const ReadoutSpec<R> readout(setup.readout.build<R>(ctx));
  const Stepper<R> stepper(h, setup.dt, setup.route);

  const PrecisionContext octx = oracle_context();
  const Matrix<SoftFloat> h_oracle = setup.hamiltonian.build<SoftFloat>(octx);
  const SoftFloat floor = default_svd_floor<SoftFloat>(octx);

  EchoCurve curve;
  curve.samples.resize(setup.taus.size());
  parallel_for(setup.taus.size(), setup.threads, [&](std::size_t i) {
    const double tau = setup.taus[i];
    if (tau < 0.0) fail(Errc::configuration, "negative evolution time");
    const SteppingPlan plan = plan_steps(tau, setup.dt);
    const Vector<R> out = stepper.evolve(psi0, plan, Direction::Forward);
    const Vector<R> rec = stepper.evolve(out, plan, Direction::Backward);
    EchoSample s;
    s.tau = tau;
    const Fidelity f = loschmidt(psi0, rec);
    s.fidelity = f.value;
    s.infidelity = f.infidelity;
    s.w_out = work_value(out, readout);
    s.w_rec = work_value(rec, readout);
    if (s.w_out > 0.0) s.eta_w = work_echo_ratio(s.w_out, s.w_rec);
    s.norm_out = to_double(sqrt(norm2(out)));
    s.norm_rec = to_double(sqrt(norm2(rec)));
    if (setup.attach_log_kappa) {
      const Matrix<SoftFloat> u = propagator(setup.route, h_oracle, tau);
      s.ln_kappa = singular_value_extremes(u, floor).log_kappa();
    }
    curve.samples[i] = std::move(s);
  });
  return curve;
}

// Runtime-dispatched entry point.
EchoCurve echo_curve(const EchoSetup& setup, const PrecisionContext& ctx);

template <class R>
struct ModeCoefficients {
  Complex<R> amplified;
  Complex<R> suppressed;

  // r = |c_p| / |c_q|
  double ratio() const { return to_double(pir::abs(amplified) / pir::abs(suppressed)); }
};

// c = V^-1 psi in the eigenbasis ordered amplified-first.
template <class R>
ModeCoefficients<R> mode_coefficients(const Vector<R>& psi, const EigResult<R>& eig) {
  if (psi.size() != 2) fail(Errc::configuration, "mode coefficients require a two-mode state");
  const double kv = eigenvector_condition(eig);
  if (!(kv < 1.0 / psi.ctx().epsilon())) {
    fail(Errc::conditioning, "eigenvector matrix is near-defective at this precision");
  }
  const Vector<R> c = eig.v_inv * psi;
  return ModeCoefficients<R>{c[0], c[1]};
}

}  // namespace pir
