#include "pirlab/echo.hpp"

#include <cmath>

namespace pir {

SteppingPlan plan_steps(double tau, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(Errc::configuration, "time step must be positive");
  if (!(tau >= 0.0) || !std::isfinite(tau)) fail(Errc::configuration, "tau must be non-negative");
  const double ratio = tau / dt;
  const double nearest = std::round(ratio);
  SteppingPlan plan;
  plan.tau = tau;
  plan.dt = dt;
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, nearest)) {
    plan.n_full = static_cast<long>(nearest);
    plan.dt_frac = 0.0;
    return plan;
  }
  plan.n_full = static_cast<long>(std::floor(ratio));
  plan.dt_frac = std::max(0.0, tau - static_cast<double>(plan.n_full) * dt);
  return plan;
}

MatrixSpec MatrixSpec::from_dimer(const DimerSpec& spec) {
  return MatrixSpec{2, {{0.0, spec.gamma}, {spec.g1, 0.0}, {spec.g2, 0.0}, {0.0, -spec.gamma}}};
}

MatrixSpec MatrixSpec::diagonal(const std::vector<std::pair<double, double>>& d) {
  MatrixSpec m;
  m.n = d.size();
  m.entries.assign(m.n * m.n, {0.0, 0.0});
  for (std::size_t i = 0; i < m.n; ++i) m.entries[i * m.n + i] = d[i];
  return m;
}

MatrixSpec MatrixSpec::real_diagonal(const std::vector<double>& d) {
  std::vector<std::pair<double, double>> c;
  c.reserve(d.size());
  for (double v : d) c.emplace_back(v, 0.0);
  return diagonal(c);
}

double work_echo_ratio(double w_out, double w_rec) {
  if (w_out == 0.0) fail(Errc::domain, "work echo ratio is undefined for W_out = 0");
  return w_rec / w_out;
}

std::vector<double> tau_grid(double start, double stop, double step) {
  if (!(step > 0.0)) fail(Errc::configuration, "tau step must be positive");
  if (stop < start) fail(Errc::configuration, "tau range is empty");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) out.push_back(start + static_cast<double>(k) * step);
  return out;
}

EchoCurve echo_curve(const EchoSetup& setup, const PrecisionContext& ctx) {
  return dispatch(ctx, [&](auto tag) { return echo_curve<decltype(tag)>(setup, ctx); });
}

}  // namespace pir
