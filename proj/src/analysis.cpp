#include "pirlab/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace pir {

const char* to_string(Observable obs) noexcept {
  switch (obs) {
    case Observable::Fidelity: return "fidelity";
    case Observable::WorkEcho: return "work_echo";
  }
  return "?";
}

Trace fidelity_trace(const EchoCurve& curve) {
  Trace t;
  for (const auto& s : curve.samples) t.push(s.tau, s.fidelity);
  return t;
}

Trace work_echo_trace(const EchoCurve& curve) {
  Trace t;
  for (const auto& s : curve.samples)
    if (s.eta_w) t.push(s.tau, *s.eta_w);
  return t;
}

Trace trace_of(const EchoCurve& curve, Observable obs) {
  return obs == Observable::Fidelity ? fidelity_trace(curve) : work_echo_trace(curve);
}

void OnsetConfig::validate() const {
  if (!(t_lo < t_hi)) fail(Errc::configuration, "plateau window needs t_lo < t_hi");
  if (!(drop_fraction > 0.0 && drop_fraction < 1.0)) {
    fail(Errc::configuration, "drop fraction must lie in (0, 1)");
  }
}

OnsetConfig OnsetConfig::adapted_to(double t_dr) const {
  OnsetConfig out = *this;
  if (t_dr < t_hi) {
    out.t_lo = 0.25 * t_dr;
    out.t_hi = 0.5 * t_dr;
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) fail(Errc::configuration, "median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double plateau_estimate(const Trace& trace, const OnsetConfig& cfg) {
  cfg.validate();
  std::vector<double> in;
  for (std::size_t i = 0; i < trace.size(); ++i)
    if (trace.tau[i] >= cfg.t_lo && trace.tau[i] <= cfg.t_hi) in.push_back(trace.value[i]);
  if (in.empty()) fail(Errc::configuration, "no samples inside the plateau window");
  return median(std::move(in));
}

double baseline_estimate(const Trace& trace) {
  if (trace.size() == 0) fail(Errc::configuration, "baseline of an empty trace");
  const std::size_t k = std::max<std::size_t>(1, trace.size() / 4);
  return median(std::vector<double>(trace.value.end() - static_cast<long>(k), trace.value.end()));
}

std::optional<double> first_crossing_below(const Trace& trace, double level) {
  std::size_t i = 0;
  while (i < trace.size() && !(trace.value[i] >= level)) ++i;
  for (++i; i < trace.size(); ++i) {
    if (!(trace.value[i] < level)) continue;
    const double t0 = trace.tau[i - 1], t1 = trace.tau[i];
    const double v0 = trace.value[i - 1], v1 = trace.value[i];
    double t = t0 + (v0 - level) / (v0 - v1) * (t1 - t0);
    // Keep the estimate strictly after the last compliant sample.
    if (!(t > t0)) t = std::nextafter(t0, t1);
    return std::min(t, t1);
  }
  return std::nullopt;
}

std::optional<double> onset_detect(const Trace& trace, double plateau, const OnsetConfig& cfg) {
  cfg.validate();
  if (!(plateau > 0.0)) fail(Errc::domain, "onset detection needs a positive plateau");
  return first_crossing_below(trace, (1.0 - cfg.drop_fraction) * plateau);
}

std::optional<double> knee_width(const Trace& trace, double plateau, double baseline,
                                 std::pair<double, double> levels) {
  const double span = plateau - baseline;
  if (!(span > 0.0)) return std::nullopt;
  const auto hi = first_crossing_below(trace, baseline + levels.first * span);
  const auto lo = first_crossing_below(trace, baseline + levels.second * span);
  if (!hi || !lo) return std::nullopt;
  return *lo - *hi;
}

OverflowEstimate estimate_overflow(const EchoCurve& curve, Observable obs, const PrecisionContext& ctx,
                                   const OnsetConfig& cfg) {
  const Trace trace = trace_of(curve, obs);
  OverflowEstimate est;
  est.observable = obs;
  est.m = ctx.bits();
  est.backend = ctx.backend();
  est.plateau = plateau_estimate(trace, cfg);
  if (est.plateau > 0.0) est.t_of = onset_detect(trace, est.plateau, cfg);
  return est;
}

std::optional<double> compare_observables(const OverflowEstimate& f, const OverflowEstimate& w) {
  if (f.m != w.m || f.backend != w.backend) {
    fail(Errc::comparison, "overflow estimates come from different precision configurations");
  }
  if (!f.t_of || !w.t_of) return std::nullopt;
  return std::abs(*f.t_of - *w.t_of);
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 3) fail(Errc::fit, "scaling fit needs at least 3 points");
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [x, y] : points) {
    sx += x;
    sy += y;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (!(sxx > 0.0)) fail(Errc::fit, "degenerate abscissae in scaling fit");
  ScalingFit fit;
  fit.points = points;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [x, y] : points) {
    fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(y - fit.predict(x)));
  }
  return fit;
}

}  // namespace pir
