#include "pirlab/model.hpp"

namespace pir {

const char* to_string(Phase phase) noexcept {
  switch (phase) {
    case Phase::Broken: return "broken";
    case Phase::Unbroken: return "unbroken";
    case Phase::ExceptionalPoint: return "exceptional_point";
  }
  return "?";
}

Phase DimerSpec::phase() const {
  // gamma^2 and g1 g2 are exact at 256 bits.
  const SoftFloat gg = SoftFloat(gamma, kOracleBits) * SoftFloat(gamma, kOracleBits);
  const SoftFloat cc = SoftFloat(g1, kOracleBits) * SoftFloat(g2, kOracleBits);
  if (gg > cc) return Phase::Broken;
  if (gg < cc) return Phase::Unbroken;
  return Phase::ExceptionalPoint;
}

namespace {

SoftFloat eta_squared(const DimerSpec& spec) {
  const SoftFloat g(spec.gamma, kOracleBits);
  return g * g - SoftFloat(spec.g1, kOracleBits) * SoftFloat(spec.g2, kOracleBits);
}

}  // namespace

double DimerSpec::eta() const {
  if (phase() == Phase::Unbroken) fail(Errc::phase, "eta is real only in the broken phase");
  return sqrt(eta_squared(*this)).to_double();
}

double delta_b(const DimerSpec& spec) {
  if (spec.phase() == Phase::Unbroken) {
    fail(Errc::phase, "Delta_b is defined in the broken phase (gamma^2 > g1 g2)");
  }
  return (sqrt(eta_squared(spec)) * SoftFloat(2.0, kOracleBits)).to_double();
}

double kappa_v_numeric(const DimerSpec& spec) {
  const PrecisionContext ctx = oracle_context();
  return eigenvector_condition(eig_2x2(spec.hamiltonian<SoftFloat>(ctx)));
}

double kappa_v(const DimerSpec& spec) {
  switch (spec.phase()) {
    case Phase::ExceptionalPoint:
      fail(Errc::exceptional_point, "kappa(V) diverges at the exceptional point");
    case Phase::Unbroken: return kappa_v_numeric(spec);
    case Phase::Broken: break;
  }
  if (!spec.is_symmetric()) return kappa_v_numeric(spec);
  const SoftFloat gamma(spec.gamma, kOracleBits);
  const SoftFloat g(spec.g1, kOracleBits);
  return sqrt((gamma + g) / (gamma - g)).to_double();
}

Oracle::Oracle(const DimerSpec& spec, double knee_constant)
    : spec_(spec),
      knee_constant_(knee_constant),
      gamma_(spec.gamma, kOracleBits),
      g_(spec.g1, kOracleBits),
      eta_(kOracleBits),
      delta_b_(kOracleBits) {
  if (!spec.is_symmetric()) {
    fail(Errc::configuration, "the closed-form oracle covers symmetric couplings only");
  }
  if (spec.phase() != Phase::Broken) fail(Errc::phase, "the oracle requires the broken phase");
  if (!(knee_constant > 0.0)) fail(Errc::configuration, "knee constant must be positive");
  eta_ = sqrt(gamma_ * gamma_ - g_ * g_);
  delta_b_ = eta_ * lit(2.0);
}

double Oracle::eta() const { return eta_.to_double(); }
double Oracle::delta_b() const { return delta_b_.to_double(); }

double Oracle::kappa_v() const { return sqrt((gamma_ + g_) / (gamma_ - g_)).to_double(); }

double Oracle::prefactor() const {
  const SoftFloat r = gamma_ / eta_;
  return (r * r).to_double();
}

double Oracle::y(double t) const { return (gamma_ / eta_ * sinh(eta_ * lit(t))).to_double(); }

double Oracle::log_kappa(double t) const {
  const SoftFloat yt = gamma_ / eta_ * sinh(eta_ * lit(t));
  return (lit(2.0) * asinh(yt)).to_double();
}

double Oracle::kappa(double t) const { return std::exp(log_kappa(t)); }

double Oracle::t_dr(double m) const {
  const SoftFloat ln_beta = log(lit(2.0));
  return (lit(m) * ln_beta / delta_b_).to_double();
}

double Oracle::t_of_exact(double m) const {
  const SoftFloat threshold = lit(m) * log(lit(2.0)) + log(lit(knee_constant_));
  const SoftFloat arg = eta_ / gamma_ * sinh(threshold / lit(2.0));
  return (lit(2.0) / delta_b_ * asinh(arg)).to_double();
}

double Oracle::t_of_asymptotic(double m) const {
  const SoftFloat r = gamma_ / eta_;
  return ((lit(m) * log(lit(2.0)) - log(r * r)) / delta_b_).to_double();
}

double dynamic_range_bits(const DimerSpec& spec, double t) {
  if (spec.phase() == Phase::Unbroken) fail(Errc::phase, "D(t) requires the broken phase");
  const SoftFloat eta2 = eta_squared(spec);
  const SoftFloat two(2.0, kOracleBits);
  return (two * sqrt(eta2) * SoftFloat(t, kOracleBits) / log(two)).to_double();
}

}  // namespace pir
