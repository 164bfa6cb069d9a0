#pragma once

// The PT-dimer family H = [[i gamma, g1], [g2, -i gamma]], the benchmark trio,
// and the closed-form oracle for kappa(U(t)) and the overflow time.

#include <cmath>
#include <string>

#include "pirlab/linalg.hpp"

namespace pir {

enum class Phase { Broken, Unbroken, ExceptionalPoint };

const char* to_string(Phase phase) noexcept;

// Working precision of every oracle evaluation.
inline constexpr int kOracleBits = 256;

inline PrecisionContext oracle_context() { return PrecisionContext::software(kOracleBits); }

struct DimerSpec {
  double gamma = 1.2;
  double g1 = 1.0;
  double g2 = 1.0;

  static DimerSpec symmetric(double gamma, double g) { return DimerSpec{gamma, g, g}; }

  bool is_symmetric() const { return g1 == g2; }
  // Exact in binary64 for the sign test: gamma^2 vs g1 g2.
  Phase phase() const;

  // sqrt(gamma^2 - g1 g2), broken phase only.
  double eta() const;

  template <class R>
  Matrix<R> hamiltonian(const PrecisionContext& ctx) const {
    Matrix<R> h(2, ctx);
    h(0, 0) = Complex<R>::make(0.0, gamma, ctx);
    h(0, 1) = Complex<R>::make(g1, 0.0, ctx);
    h(1, 0) = Complex<R>::make(g2, 0.0, ctx);
    h(1, 1) = Complex<R>::make(0.0, -gamma, ctx);
    return h;
  }
};

// Delta_b = 2 sqrt(gamma^2 - g1 g2). Throws Errc::phase outside the broken phase
// (returns 0 exactly at the exceptional point).
double delta_b(const DimerSpec& spec);

// kappa(V): closed form sqrt((gamma+g)/(gamma-g)) for symmetric dimers, the
// numerical ||V|| ||V^-1|| otherwise.
double kappa_v(const DimerSpec& spec);

// ||V|| ||V^-1|| with unit columns, at oracle precision.
double kappa_v_numeric(const DimerSpec& spec);

// Closed-form analytics of the broken-phase symmetric dimer, evaluated at
// kOracleBits regardless of the experiment's precision.
class Oracle {
 public:
  explicit Oracle(const DimerSpec& spec, double knee_constant = 1.0);

  const DimerSpec& spec() const { return spec_; }
  double knee_constant() const { return knee_constant_; }

  double eta() const;
  double delta_b() const;
  double kappa_v() const;
  // C = (gamma / eta)^2
  double prefactor() const;

  // y(t) = (gamma / eta) sinh(eta t)
  double y(double t) const;
  // ln kappa(U(t)) = 2 asinh(y(t)); finite for any t the oracle can hold.
  double log_kappa(double t) const;
  // exp(log_kappa); may overflow to +inf.
  double kappa(double t) const;

  // T_DR = m ln(beta) / Delta_b
  double t_dr(double m) const;
  // (2 / Delta_b) asinh[(eta / gamma) sinh((m ln beta + ln c) / 2)]
  double t_of_exact(double m) const;
  // (m ln beta - ln C) / Delta_b
  double t_of_asymptotic(double m) const;

  SoftFloat eta_exact() const { return eta_; }

 private:
  SoftFloat lit(double v) const { return SoftFloat(v, kOracleBits); }

  DimerSpec spec_;
  double knee_constant_;
  SoftFloat gamma_;
  SoftFloat g_;
  SoftFloat eta_;
  SoftFloat delta_b_;
};

// D(t) = Delta_b t / ln 2
double dynamic_range_bits(const DimerSpec& spec, double t);

template <class R>
struct BenchmarkTrio {
  Matrix<R> pt;
  Matrix<R> normal;
  Matrix<R> hermitian;
  double lambda;
};

template <class R>
BenchmarkTrio<R> benchmark_trio(double gamma, double g, const PrecisionContext& ctx) {
  const DimerSpec spec = DimerSpec::symmetric(gamma, g);
  if (spec.phase() != Phase::Broken) fail(Errc::phase, "benchmark trio requires the broken phase");
  const double lambda = spec.eta();
  Matrix<R> normal(2, ctx);
  normal(0, 0) = Complex<R>::make(0.0, lambda, ctx);
  normal(1, 1) = Complex<R>::make(0.0, -lambda, ctx);
  Matrix<R> herm(2, ctx);
  herm(0, 0) = Complex<R>::make(lambda, 0.0, ctx);
  herm(1, 1) = Complex<R>::make(-lambda, 0.0, ctx);
  return BenchmarkTrio<R>{spec.hamiltonian<R>(ctx), std::move(normal), std::move(herm), lambda};
}

}  // namespace pir
