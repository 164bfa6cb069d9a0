#pragma once

// Onset extraction, knee sharpness and the T_of(m) scaling fit.

#include <optional>
#include <utility>
#include <vector>

#include "pirlab/echo.hpp"
#include "pirlab/precision.hpp"

namespace pir {

// Sampled observable; samples with a missing value are simply absent.
struct Trace {
  std::vector<double> tau;
  std::vector<double> value;

  std::size_t size() const { return tau.size(); }
  void push(double t, double v) {
    tau.push_back(t);
    value.push_back(v);
  }
};

enum class Observable { Fidelity, WorkEcho };

const char* to_string(Observable obs) noexcept;

Trace fidelity_trace(const EchoCurve& curve);
// eta_W samples; tau points with W_out = 0 are skipped.
Trace work_echo_trace(const EchoCurve& curve);
Trace trace_of(const EchoCurve& curve, Observable obs);

struct OnsetConfig {
  double t_lo = 1.0;
  double t_hi = 4.0;
  double drop_fraction = 0.01;

  void validate() const;
  // Shrinks the window to [t_dr / 4, t_dr / 2] when t_dr < t_hi.
  OnsetConfig adapted_to(double t_dr) const;
};

double median(std::vector<double> values);

// Median over tau in [t_lo, t_hi]; Errc::configuration when the window is empty.
double plateau_estimate(const Trace& trace, const OnsetConfig& cfg);

// Median over the last quarter of the samples (at least one).
double baseline_estimate(const Trace& trace);

// First time the trace falls strictly below `level`, searched after it has first
// reached the level. Linear interpolation between the bracketing samples.
std::optional<double> first_crossing_below(const Trace& trace, double level);

// min{tau : value < (1 - drop) * plateau}, refined by interpolation.
std::optional<double> onset_detect(const Trace& trace, double plateau, const OnsetConfig& cfg);

// tau(lo) - tau(hi) with levels as fractions of the fall from plateau to baseline.
std::optional<double> knee_width(const Trace& trace, double plateau, double baseline,
                                 std::pair<double, double> levels = {0.9, 0.1});

struct OverflowEstimate {
  Observable observable = Observable::Fidelity;
  int m = 0;
  Backend backend = Backend::Software;
  std::optional<double> t_of;
  double plateau = 0.0;
};

OverflowEstimate estimate_overflow(const EchoCurve& curve, Observable obs, const PrecisionContext& ctx,
                                   const OnsetConfig& cfg);

// |T_of(F) - T_of(eta_W)|; nullopt if either onset was not found.
std::optional<double> compare_observables(const OverflowEstimate& f, const OverflowEstimate& w);

struct ScalingFit {
  std::vector<std::pair<double, double>> points;
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;

  double predict(double m) const { return slope * m + intercept; }
};

// Ordinary least squares; Errc::fit for fewer than 3 points or one abscissa.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points);

}  // namespace pir
