// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "pirlab/analysis.hpp"
#include "pirlab/echo.hpp"
#include "pirlab/model.hpp"
#include "support/kernel_properties.hpp"

using namespace pir;

namespace {

const DimerSpec kSpec = DimerSpec::symmetric(1.2, 1.0);
const double kLn2 = std::log(2.0);

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

double t_dr(int m) { return m * kLn2 / delta_b(kSpec); }

struct Run {
  EchoCurve curve;
  OverflowEstimate f;
  OverflowEstimate w;
};

EchoSetup default_setup(double tau_max) {
  EchoSetup s;
  s.hamiltonian = MatrixSpec::from_dimer(kSpec);
  s.taus = tau_grid(0.0, tau_max, 0.5);
  s.threads = threads();
  return s;
}

Run run(const EchoSetup& s, const PrecisionContext& ctx) {
  Run r{echo_curve(s, ctx), {}, {}};
  const OnsetConfig oc = OnsetConfig{}.adapted_to(t_dr(ctx.bits()));
  r.f = estimate_overflow(r.curve, Observable::Fidelity, ctx, oc);
  r.w = estimate_overflow(r.curve, Observable::WorkEcho, ctx, oc);
  return r;
}

// Default echo runs are shared between criteria.
const Run& default_run(const PrecisionContext& ctx) {
  static std::map<std::pair<int, int>, Run> cache;
  const auto key = std::make_pair(static_cast<int>(ctx.backend()), ctx.bits());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, run(default_setup(1.6 * t_dr(ctx.bits())), ctx)).first;
  return it->second;
}

std::string on(const std::optional<double>& v) {
  if (!v) return "none";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *v);
  return buf;
}

struct Outcome {
  bool pass;
  std::string detail;
};

const std::vector<int> kScalingMs{15, 30, 50, 70, 90};

ScalingFit software_fit() {
  std::vector<std::pair<double, double>> pts;
  for (int m : kScalingMs) {
    const auto& r = default_run(PrecisionContext::software(m));
    if (r.f.t_of) pts.emplace_back(m, *r.f.t_of);
  }
  return fit_scaling(pts);
}

Outcome oracle_consistency() {
  const Oracle oracle(kSpec);
  const PrecisionContext ctx = PrecisionContext::software(200);
  const auto h = kSpec.hamiltonian<SoftFloat>(ctx);
  double worst = 0.0;
  for (int t = 1; t <= 20; ++t) {
    const double svd = svd_2x2(propagator(PropagatorRoute::ClosedForm, h, t)).log_kappa();
    const double exact = oracle.log_kappa(t);
    worst = std::max(worst, std::abs(svd - exact) / exact);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max relative error %.2e (limit 1e-6)", worst);
  return {worst < 1e-6, buf};
}

bool four_sig(double v, double ref) {
  char a[32], b[32];
  std::snprintf(a, sizeof a, "%.4g", v);
  std::snprintf(b, sizeof b, "%.4g", ref);
  return std::string(a) == b;
}

Outcome closed_constants() {
  const Oracle o(kSpec);
  char buf[128];
  std::snprintf(buf, sizeof buf, "eta %.4g, kappa_V %.4g, C %.4g (want 0.6633, 3.317, 3.273)", o.eta(),
                o.kappa_v(), o.prefactor());
  return {four_sig(o.eta(), 0.6633) && four_sig(o.kappa_v(), 3.317) && four_sig(o.prefactor(), 3.273), buf};
}

Outcome scaling_law() {
  const ScalingFit fit = software_fit();
  const double expected = kLn2 / delta_b(kSpec);
  const double ratio = fit.slope / expected;
  const bool slope_ok = std::abs(ratio - 1.0) < 0.05;
  const bool icpt_ok = fit.intercept >= -2.0 && fit.intercept <= 0.0 && fit.points.size() == kScalingMs.size();
  char buf[192];
  std::snprintf(buf, sizeof buf, "slope %.4f (%.1f%% of %.4f, need within 5%%): %s; intercept %.3f (need [-2, 0]): %s",
                fit.slope, 100.0 * ratio, expected, slope_ok ? "ok" : "out", fit.intercept, icpt_ok ? "ok" : "out");
  return {slope_ok && icpt_ok, buf};
}

Outcome native_agreement() {
  const ScalingFit fit = software_fit();
  bool ok = true;
  std::string d;
  for (const PrecisionContext& ctx : {PrecisionContext::native64(), PrecisionContext::native32()}) {
    const auto& r = default_run(ctx);
    const double pred = fit.predict(ctx.bits());
    const double dev = r.f.t_of ? std::abs(*r.f.t_of - pred) / pred : INFINITY;
    ok = ok && dev < 0.10;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s(m=%d) T_of %s vs line %.3f (%.1f%%); ", to_string(ctx.backend()), ctx.bits(),
                  on(r.f.t_of).c_str(), pred, 100.0 * dev);
    d += buf;
  }
  // Native32 reported as m = 23; its hardware significand carries 24 bits.
  const auto& r32 = default_run(PrecisionContext::native32());
  if (r32.f.t_of) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "Native32 at m=24 would be %.1f%% off",
                  100.0 * std::abs(*r32.f.t_of - fit.predict(24)) / fit.predict(24));
    d += buf;
  }
  return {ok, d};
}

Outcome m53_onset() {
  const auto& r = default_run(PrecisionContext::software(53));
  const bool ok = r.f.t_of && std::abs(*r.f.t_of - 27.0) <= 1.5;
  return {ok, "Software(53) T_of " + on(r.f.t_of) + " (need 27 +/- 1.5)"};
}

Outcome knee_sharpness() {
  std::vector<double> widths;
  std::string d;
  bool each = true;
  for (int m : {15, 50, 90}) {
    const auto& r = default_run(PrecisionContext::software(m));
    const Trace t = fidelity_trace(r.curve);
    const auto w = knee_width(t, r.f.plateau, baseline_estimate(t));
    each = each && w && *w * delta_b(kSpec) < 5.0;
    if (w) widths.push_back(*w);
    d += "m=" + std::to_string(m) + " width " + on(w) + "; ";
  }
  const bool lengths = widths.size() == 3;
  const double ratio = lengths ? *std::max_element(widths.begin(), widths.end()) /
                                     *std::min_element(widths.begin(), widths.end())
                               : INFINITY;
  char buf[128];
  std::snprintf(buf, sizeof buf, "width*Delta_b < 5: %s; max/min %.2f (need <= 2): %s", each ? "ok" : "out", ratio,
                ratio <= 2.0 ? "ok" : "out");
  return {each && ratio <= 2.0, d + buf};
}

Outcome trio_check() {
  const PrecisionContext ctx = PrecisionContext::software(53);
  const double lambda = kSpec.eta();
  EchoSetup s = default_setup(55.0);
  s.attach_log_kappa = false;
  const EchoCurve pt = echo_curve(s, ctx);
  s.hamiltonian = MatrixSpec::diagonal({{0.0, lambda}, {0.0, -lambda}});
  const EchoCurve normal = echo_curve(s, ctx);
  s.hamiltonian = MatrixSpec::real_diagonal({lambda, -lambda});
  const EchoCurve herm = echo_curve(s, ctx);

  std::optional<double> pt_below;
  for (const auto& x : pt.samples)
    if (!pt_below && x.fidelity < 0.5) pt_below = x.tau;
  double normal_min = 1.0, herm_gap = 0.0;
  for (const auto& x : normal.samples) normal_min = std::min(normal_min, x.fidelity);
  for (const auto& x : herm.samples) herm_gap = std::max(herm_gap, x.infidelity);
  const bool ok = pt_below && *pt_below <= 32.0 && normal_min > 0.999 && herm_gap < 1e-10;
  char buf[192];
  std::snprintf(buf, sizeof buf, "PT F<0.5 first at tau %s (need <= 32); normal min F %.6f; Hermitian max 1-F %.1e",
                on(pt_below).c_str(), normal_min, herm_gap);
  return {ok, buf};
}

Outcome work_echo() {
  const auto& r50 = default_run(PrecisionContext::software(50));
  const Trace wt = work_echo_trace(r50.curve);
  const double plateau = r50.w.plateau;
  const double sat = baseline_estimate(wt);
  const bool levels = std::abs(plateau - 1.2) <= 0.1 && std::abs(sat - 0.3) <= 0.1;

  bool onsets = true;
  std::string d;
  char buf[160];
  std::snprintf(buf, sizeof buf, "plateau %.4f (1.2 +/- 0.1), saturation %.4f (0.3 +/- 0.1); onset |F-W|:", plateau,
                sat);
  d = buf;
  for (int m : {15, 50, 90}) {
    const auto& r = default_run(PrecisionContext::software(m));
    const auto diff = compare_observables(r.f, r.w);
    onsets = onsets && diff && *diff <= 1.0;
    d += " m=" + std::to_string(m) + " " + on(diff);
  }
  {
    const auto& r = default_run(PrecisionContext::software(30));
    d += " (m=30, not in the set: " + on(compare_observables(r.f, r.w)) + ")";
  }

  const std::vector<std::pair<double, double>> states{{1, 0.01}, {1, 0.5}, {1, -0.3}, {1, 1}, {0.3, 1}};
  std::vector<double> plats, sats;
  for (const auto& [a, b] : states) {
    EchoSetup s = default_setup(1.6 * t_dr(50));
    s.psi0 = {{a, 0.0}, {b, 0.0}};
    s.attach_log_kappa = false;
    const Run r = run(s, PrecisionContext::software(50));
    plats.push_back(r.w.plateau);
    sats.push_back(baseline_estimate(work_echo_trace(r.curve)));
  }
  double sat_spread = 0.0, plat_gap = INFINITY;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      sat_spread = std::max(sat_spread, std::abs(sats[i] - sats[j]) / std::abs(sats[j]));
      plat_gap = std::min(plat_gap, std::abs(plats[i] - plats[j]) / std::max(std::abs(plats[i]), std::abs(plats[j])));
    }
  const bool universal = sat_spread < 0.01 && plat_gap > 0.05;
  std::snprintf(buf, sizeof buf, "; 5 states: post-knee spread %.1e (< 1%%), min plateau gap %.1f%% (> 5%%)",
                sat_spread, 100.0 * plat_gap);
  d += buf;
  return {levels && onsets && universal, d};
}

Outcome restoration() {
  EchoSetup s = default_setup(20.0);
  s.attach_log_kappa = false;
  const EchoCurve c = echo_curve(s, PrecisionContext::software(200));
  double worst = 0.0;
  for (const auto& x : c.samples) worst = std::max(worst, x.infidelity);
  char buf[96];
  std::snprintf(buf, sizeof buf, "Software(200) max 1-F over tau <= 20: %.2e (need < 1e-20)", worst);
  return {worst < 1e-20, buf};
}

Outcome kernel_conformance() {
  using namespace pir::testing;
  const long n = 10000;
  const std::vector<PropertyReport> reps{check_idempotence(n, 11), check_ties_to_even(n, 12), check_swamping(n, 13),
                                         check_native64_agreement(n, 14), check_correct_rounding(n, 15)};
  bool ok = true;
  std::string d;
  for (const auto& r : reps) {
    ok = ok && r.ok();
    d += r.name + " " + std::to_string(r.cases - r.failures) + "/" + std::to_string(r.cases) + "; ";
    if (!r.ok() && !r.first_failure.empty()) d += "(" + r.first_failure + ") ";
  }
  return {ok, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"oracle-consistency", oracle_consistency},
      {"closed-constants", closed_constants},
      {"scaling-law", scaling_law},
      {"hardware-backends", native_agreement},
      {"m53-onset", m53_onset},
      {"knee-sharpness", knee_sharpness},
      {"benchmark-trio", trio_check},
      {"work-echo", work_echo},
      {"restoration", restoration},
      {"kernel-conformance", kernel_conformance},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %-19s [%6.2fs] %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed ? 1 : 0;
}
