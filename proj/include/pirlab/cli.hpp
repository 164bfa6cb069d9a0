#pragma once

// Command-line front end: run configuration, the four sweep commands, and
// CSV/manifest output.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pirlab/analysis.hpp"
#include "pirlab/echo.hpp"
#include "pirlab/model.hpp"
#include "pirlab/precision.hpp"

namespace pir::cli {

enum class Command { KappaCurve, Echo, Scaling, Benchmark };

const char* to_string(Command c) noexcept;

struct RunConfig {
  Command command = Command::Echo;
  DimerSpec spec;
  std::vector<Backend> backends;  // empty: {Software}
  std::vector<int> ms;            // empty: per-command default
  double tau_start = 0.0;
  std::optional<double> tau_max;  // empty: per-command default
  double tau_step = 0.5;
  double dt = 0.4;
  std::vector<double> h0{2.0, -2.0};
  std::vector<double> psi0{1.0, 0.01};
  OnsetConfig onset;
  PropagatorRoute route = PropagatorRoute::ClosedForm;
  int svd_bits = 200;
  unsigned threads = 1;
  std::filesystem::path out = "out";

  // Throws Errc::configuration on any inconsistency.
  void validate() const;
};

std::vector<int> default_ms(Command c);

// Precision contexts in run order: Software at each m, natives once each.
std::vector<PrecisionContext> contexts(const RunConfig& cfg);

// Applies `key = value` lines ('#' starts a comment) on top of cfg.
void apply_config_text(RunConfig& cfg, const std::string& text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

std::string config_json(const RunConfig& cfg);

// CSV number rendering: %.17g, empty for a missing value.
std::string csv_number(double v);
std::string csv_number(const std::optional<double>& v);

std::string sha256_hex(const std::filesystem::path& path);

// Writes `content` to a temporary sibling, then renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::string summary;  // human-readable table for stdout
};

CommandResult cmd_kappa_curve(const RunConfig& cfg);
CommandResult cmd_echo(const RunConfig& cfg);
CommandResult cmd_scaling(const RunConfig& cfg);
CommandResult cmd_benchmark(const RunConfig& cfg);

CommandResult execute(const RunConfig& cfg);

// Process exit code for an error category: 1 validation, 2 I/O, 3 numeric/internal.
int exit_code(Errc code) noexcept;

// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pir::cli
