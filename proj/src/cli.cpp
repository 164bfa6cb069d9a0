#include "pirlab/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#ifndef PIRLAB_VERSION
#define PIRLAB_VERSION "dev"
#endif

namespace pir::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::KappaCurve: return "kappa-curve";
    case Command::Echo: return "echo";
    case Command::Scaling: return "scaling";
    case Command::Benchmark: return "benchmark";
  }
  return "?";
}

std::vector<int> default_ms(Command c) {
  switch (c) {
    case Command::KappaCurve: return {30, 60, 90};
    case Command::Echo: return {15, 50, 90};
    case Command::Scaling: return {15, 30, 50, 70, 90};
    case Command::Benchmark: return {53};
  }
  return {};
}

namespace {

std::vector<Backend> effective_backends(const RunConfig& cfg) {
  return cfg.backends.empty() ? std::vector<Backend>{Backend::Software} : cfg.backends;
}

std::vector<int> effective_ms(const RunConfig& cfg) {
  return cfg.ms.empty() ? default_ms(cfg.command) : cfg.ms;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    fail(Errc::configuration, "invalid number for " + key + ": '" + text + "'");
  }
  return v;
}

long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    fail(Errc::configuration, "invalid integer for " + key + ": '" + text + "'");
  }
  return v;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(parse_double(key, item));
  return out;
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

void set_key(RunConfig& cfg, const std::string& raw_key, const std::string& value) {
  const std::string key = normalize_key(raw_key);
  if (key == "gamma") {
    cfg.spec.gamma = parse_double(key, value);
  } else if (key == "g1") {
    cfg.spec.g1 = parse_double(key, value);
  } else if (key == "g2") {
    cfg.spec.g2 = parse_double(key, value);
  } else if (key == "g") {
    cfg.spec.g1 = cfg.spec.g2 = parse_double(key, value);
  } else if (key == "m") {
    cfg.ms.clear();
    for (const auto& item : split_list(value)) cfg.ms.push_back(static_cast<int>(parse_int(key, item)));
  } else if (key == "backend") {
    cfg.backends.clear();
    for (const auto& item : split_list(value)) cfg.backends.push_back(backend_from_string(item));
  } else if (key == "dt") {
    cfg.dt = parse_double(key, value);
  } else if (key == "tau_start") {
    cfg.tau_start = parse_double(key, value);
  } else if (key == "tau_max") {
    cfg.tau_max = parse_double(key, value);
  } else if (key == "tau_step") {
    cfg.tau_step = parse_double(key, value);
  } else if (key == "h0") {
    cfg.h0 = parse_doubles(key, value);
  } else if (key == "psi0") {
    cfg.psi0 = parse_doubles(key, value);
  } else if (key == "route") {
    cfg.route = route_from_string(trim(value));
  } else if (key == "svd_bits") {
    cfg.svd_bits = static_cast<int>(parse_int(key, value));
  } else if (key == "threads") {
    const long n = parse_int(key, value);
    if (n < 1) fail(Errc::configuration, "threads must be at least 1");
    cfg.threads = static_cast<unsigned>(n);
  } else if (key == "out") {
    cfg.out = trim(value);
  } else if (key == "plateau_window") {
    const auto w = parse_doubles(key, value);
    if (w.size() != 2) fail(Errc::configuration, "plateau_window needs two values");
    cfg.onset.t_lo = w[0];
    cfg.onset.t_hi = w[1];
  } else if (key == "drop_fraction") {
    cfg.onset.drop_fraction = parse_double(key, value);
  } else {
    fail(Errc::configuration, "unknown configuration key '" + raw_key + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  for (double v : {spec.gamma, spec.g1, spec.g2, dt, tau_start, tau_step}) {
    if (!std::isfinite(v)) fail(Errc::configuration, "non-finite parameter");
  }
  if (!(dt > 0.0)) fail(Errc::configuration, "dt must be positive");
  if (!(tau_step > 0.0)) fail(Errc::configuration, "tau_step must be positive");
  if (tau_start < 0.0) fail(Errc::configuration, "tau_start must be non-negative");
  if (tau_max && !(*tau_max >= tau_start)) fail(Errc::configuration, "tau_max must be >= tau_start");
  if (!ms.empty() || command != Command::KappaCurve) {
    const auto m_list = ms.empty() ? default_ms(command) : ms;
    if (m_list.empty()) fail(Errc::configuration, "empty m list");
    for (int m : m_list) {
      if (command == Command::KappaCurve) {
        if (m < 0) fail(Errc::configuration, "m must be non-negative");
      } else if (m < PrecisionContext::kMinSoftwareBits || m > PrecisionContext::kMaxSoftwareBits) {
        fail(Errc::configuration, "m outside [2, 256]");
      }
    }
  }
  if (h0.empty()) fail(Errc::configuration, "h0 needs at least one entry");
  if (h0.size() != 2) fail(Errc::configuration, "h0 must have one entry per dimer site (2)");
  if (psi0.size() != 2) fail(Errc::configuration, "psi0 must have 2 entries");
  if (psi0[0] == 0.0 && psi0[1] == 0.0) fail(Errc::configuration, "psi0 must be nonzero");
  if (svd_bits < PrecisionContext::kMinSoftwareBits || svd_bits > PrecisionContext::kMaxSoftwareBits) {
    fail(Errc::configuration, "svd_bits outside [2, 256]");
  }
  if (threads < 1) fail(Errc::configuration, "threads must be at least 1");
  onset.validate();
  if (command == Command::Scaling) {
    long software_points = 0;
    for (Backend b : effective_backends(*this))
      if (b == Backend::Software) software_points = static_cast<long>(effective_ms(*this).size());
    if (software_points < 3) fail(Errc::configuration, "scaling needs at least 3 software m values");
  }
  if (command == Command::KappaCurve || command == Command::Benchmark) {
    if (spec.phase() != Phase::Broken) fail(Errc::phase, std::string(to_string(command)) + " requires the broken phase");
  }
  if (command == Command::KappaCurve && !spec.is_symmetric()) {
    fail(Errc::configuration, "kappa-curve compares against the symmetric-coupling oracle");
  }
  if (command == Command::Benchmark && !spec.is_symmetric()) {
    fail(Errc::configuration, "benchmark trio is defined for symmetric couplings");
  }
}

std::vector<PrecisionContext> contexts(const RunConfig& cfg) {
  std::vector<PrecisionContext> out;
  for (Backend b : effective_backends(cfg)) {
    if (b == Backend::Software) {
      for (int m : effective_ms(cfg)) out.push_back(PrecisionContext::software(m));
    } else {
      out.push_back(PrecisionContext::create(b));
    }
  }
  return out;
}

void apply_config_text(RunConfig& cfg, const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(Errc::configuration, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    set_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void apply_config_file(RunConfig& cfg, const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io, "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  apply_config_text(cfg, ss.str());
}

namespace {

json spec_json(const DimerSpec& spec) {
  json j;
  j["gamma"] = spec.gamma;
  j["g1"] = spec.g1;
  j["g2"] = spec.g2;
  j["phase"] = to_string(spec.phase());
  if (spec.phase() == Phase::Broken) {
    j["delta_b"] = delta_b(spec);
    j["eta"] = spec.eta();
    j["kappa_V"] = kappa_v(spec);
    if (spec.is_symmetric()) {
      j["C"] = Oracle(spec).prefactor();
    } else {
      j["C"] = nullptr;
    }
  } else {
    j["delta_b"] = nullptr;
    j["eta"] = nullptr;
    j["kappa_V"] = spec.phase() == Phase::Unbroken ? json(kappa_v(spec)) : json(nullptr);
    j["C"] = nullptr;
  }
  return j;
}

json config_object(const RunConfig& cfg) {
  json j;
  j["command"] = to_string(cfg.command);
  j["gamma"] = cfg.spec.gamma;
  j["g1"] = cfg.spec.g1;
  j["g2"] = cfg.spec.g2;
  json backends = json::array();
  for (Backend b : effective_backends(cfg)) backends.push_back(to_string(b));
  j["backend"] = backends;
  j["m"] = effective_ms(cfg);
  j["tau_start"] = cfg.tau_start;
  j["tau_max"] = cfg.tau_max ? json(*cfg.tau_max) : json(nullptr);
  j["tau_step"] = cfg.tau_step;
  j["dt"] = cfg.dt;
  j["h0"] = cfg.h0;
  j["psi0"] = cfg.psi0;
  j["plateau_window"] = {cfg.onset.t_lo, cfg.onset.t_hi};
  j["drop_fraction"] = cfg.onset.drop_fraction;
  j["plateau_statistic"] = "median";
  j["route"] = to_string(cfg.route);
  j["svd_bits"] = cfg.svd_bits;
  j["threads"] = cfg.threads;
  j["out"] = cfg.out.string();
  j["deterministic"] = true;
  return j;
}

json context_json(const PrecisionContext& ctx) {
  json j;
  j["backend"] = to_string(ctx.backend());
  j["m"] = ctx.bits();
  j["beta"] = ctx.base();
  j["epsilon"] = ctx.epsilon();
  if (ctx.backend() == Backend::Software) j["decimal_digits"] = ctx.decimal_digits();
  return j;
}

std::string run_tag(const PrecisionContext& ctx) {
  return std::string(to_string(ctx.backend())) + "_m" + std::to_string(ctx.bits());
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) { row_strings(header); }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os_ << ',';
      os_ << cells[i];
    }
    os_ << '\n';
  }

  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

fs::path write_output(const RunConfig& cfg, const std::string& name, const std::string& content,
                      std::vector<fs::path>& files) {
  const fs::path path = cfg.out / name;
  write_atomic(path, content);
  files.push_back(path);
  return path;
}

unsigned worker_count(const RunConfig& cfg) { return std::max(1u, cfg.threads); }

// Default tau grid for echo-type runs: [start, 1.6 t_dr(m)], or a fixed
// 40 time units when the spec has no amplification rate.
std::vector<double> echo_taus(const RunConfig& cfg, const DimerSpec& spec, int m, double factor) {
  double stop = 40.0;
  if (cfg.tau_max) {
    stop = *cfg.tau_max;
  } else if (spec.phase() == Phase::Broken) {
    stop = factor * m * std::log(2.0) / delta_b(spec);
  }
  return tau_grid(cfg.tau_start, std::max(stop, cfg.tau_start), cfg.tau_step);
}

OnsetConfig onset_for(const RunConfig& cfg, const DimerSpec& spec, int m) {
  if (spec.phase() != Phase::Broken) return cfg.onset;
  return cfg.onset.adapted_to(m * std::log(2.0) / delta_b(spec));
}

EchoSetup setup_for(const RunConfig& cfg, const MatrixSpec& h, std::vector<double> taus) {
  EchoSetup s;
  s.hamiltonian = h;
  s.psi0 = {{cfg.psi0[0], 0.0}, {cfg.psi0[1], 0.0}};
  s.readout = MatrixSpec::real_diagonal(cfg.h0);
  s.dt = cfg.dt;
  s.taus = std::move(taus);
  s.route = cfg.route;
  s.threads = worker_count(cfg);
  return s;
}

std::string echo_csv(const EchoCurve& curve) {
  CsvWriter w({"tau", "F", "W_out", "W_rec", "eta_W", "norm_out", "norm_rec", "ln_kappa", "infidelity"});
  for (const auto& s : curve.samples) {
    w.row_strings({csv_number(s.tau), csv_number(s.fidelity), csv_number(s.w_out), csv_number(s.w_rec),
                   csv_number(s.eta_w), csv_number(s.norm_out), csv_number(s.norm_rec),
                   csv_number(s.ln_kappa), csv_number(s.infidelity)});
  }
  return w.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct EchoRun {
  PrecisionContext ctx;
  EchoCurve curve;
  OverflowEstimate fidelity;
  OverflowEstimate work;
  std::optional<double> work_saturation;
  std::optional<double> knee;
};

EchoRun run_echo(const RunConfig& cfg, const MatrixSpec& h, const PrecisionContext& ctx, double factor) {
  const auto taus = echo_taus(cfg, cfg.spec, ctx.bits(), factor);
  EchoRun r{ctx, echo_curve(setup_for(cfg, h, taus), ctx), {}, {}, std::nullopt, std::nullopt};
  const OnsetConfig oc = onset_for(cfg, cfg.spec, ctx.bits());
  r.fidelity = estimate_overflow(r.curve, Observable::Fidelity, ctx, oc);
  const Trace wt = work_echo_trace(r.curve);
  if (wt.size() > 0) {
    r.work = estimate_overflow(r.curve, Observable::WorkEcho, ctx, oc);
    r.work_saturation = baseline_estimate(wt);
  } else {
    r.work = OverflowEstimate{Observable::WorkEcho, ctx.bits(), ctx.backend(), std::nullopt, 0.0};
  }
  const Trace ft = fidelity_trace(r.curve);
  r.knee = knee_width(ft, r.fidelity.plateau, baseline_estimate(ft));
  return r;
}

double t_dr_of(const DimerSpec& spec, int m) {
  return spec.phase() == Phase::Broken ? m * std::log(2.0) / delta_b(spec) : NAN;
}

std::optional<double> t_of_exact_of(const DimerSpec& spec, int m) {
  if (spec.phase() != Phase::Broken || !spec.is_symmetric()) return std::nullopt;
  return Oracle(spec).t_of_exact(m);
}

std::string fmt(const std::optional<double>& v, int prec = 3) {
  if (!v) return "not-found";
  std::ostringstream os;
  os << std::fixed << std::setprecision(prec) << *v;
  return os.str();
}

}  // namespace

std::string config_json(const RunConfig& cfg) { return config_object(cfg).dump(2); }

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_number(const std::optional<double>& v) { return v ? csv_number(*v) : std::string(); }

std::string sha256_hex(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot read " + path.string() + " for checksum");
  EVP_MD_CTX* md = EVP_MD_CTX_new();
  if (!md || EVP_DigestInit_ex(md, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(md);
    fail(Errc::internal, "SHA-256 unavailable");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    EVP_DigestUpdate(md, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(md, digest, &len);
  EVP_MD_CTX_free(md);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) fail(Errc::io, "cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::io, "cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) fail(Errc::io, "write failed for " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) fail(Errc::io, "cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

CommandResult cmd_kappa_curve(const RunConfig& cfg) {
  const Oracle oracle(cfg.spec);
  const PrecisionContext sctx = PrecisionContext::software(cfg.svd_bits);
  const auto h = cfg.spec.hamiltonian<SoftFloat>(sctx);
  // Default range: [0, 20], stretched so every requested threshold is crossed.
  double stop = 20.0;
  for (int m : effective_ms(cfg)) stop = std::max(stop, std::ceil(1.1 * oracle.t_dr(m)));
  const auto taus = tau_grid(cfg.tau_start, cfg.tau_max.value_or(stop), cfg.tau_step);
  std::vector<double> svd(taus.size());
  parallel_for(taus.size(), worker_count(cfg), [&](std::size_t i) {
    svd[i] = svd_2x2(propagator(cfg.route, h, taus[i])).log_kappa();
  });
  CsvWriter curve({"t", "ln_kappa_svd", "ln_kappa_exact", "D_bits"});
  double worst = 0.0;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double exact = oracle.log_kappa(taus[i]);
    if (exact > 0.0) worst = std::max(worst, std::abs(svd[i] - exact) / exact);
    curve.row_strings({csv_number(taus[i]), csv_number(svd[i]), csv_number(exact),
                       csv_number(dynamic_range_bits(cfg.spec, taus[i]))});
  }
  CsvWriter thr({"m", "threshold", "t_dr", "t_of_exact", "t_cross_svd"});
  std::ostringstream summary;
  summary << "kappa-curve: " << taus.size() << " points, SVD at " << cfg.svd_bits
          << " bits, max relative deviation from oracle " << std::scientific << std::setprecision(2) << worst
          << "\n";
  summary << std::fixed;
  summary << "     m   threshold       t_dr   t_of_exact   t_cross_svd\n";
  for (int m : effective_ms(cfg)) {
    const double level = m * std::log(2.0);
    std::optional<double> cross;
    for (std::size_t i = 1; i < taus.size() && !cross; ++i) {
      if (svd[i - 1] < level && svd[i] >= level) {
        cross = taus[i - 1] + (level - svd[i - 1]) / (svd[i] - svd[i - 1]) * (taus[i] - taus[i - 1]);
      }
    }
    thr.row_strings({std::to_string(m), csv_number(level), csv_number(oracle.t_dr(m)),
                     csv_number(oracle.t_of_exact(m)), csv_number(cross)});
    summary << std::setw(6) << m << std::setw(12) << std::setprecision(4) << level << std::setw(11)
            << oracle.t_dr(m) << std::setw(13) << oracle.t_of_exact(m) << std::setw(14)
            << fmt(cross, 4) << "\n";
  }
  CommandResult r;
  write_output(cfg, "kappa_curve.csv", curve.str(), r.files);
  write_output(cfg, "kappa_thresholds.csv", thr.str(), r.files);
  r.summary = summary.str();
  return r;
}

CommandResult cmd_echo(const RunConfig& cfg) {
  CommandResult r;
  json runs = json::array();
  std::ostringstream summary;
  summary << "backend        m   F plateau   T_of(F)   eta_W plateau   eta_W sat   T_of(eta_W)   knee width\n";
  const MatrixSpec h = MatrixSpec::from_dimer(cfg.spec);
  for (const auto& ctx : contexts(cfg)) {
    const EchoRun run = run_echo(cfg, h, ctx, 1.6);
    write_output(cfg, "echo_" + run_tag(ctx) + ".csv", echo_csv(run.curve), r.files);
    json j = context_json(ctx);
    j["file"] = "echo_" + run_tag(ctx) + ".csv";
    j["t_dr"] = cfg.spec.phase() == Phase::Broken ? json(t_dr_of(cfg.spec, ctx.bits())) : json(nullptr);
    j["t_of_exact"] = optional_json(t_of_exact_of(cfg.spec, ctx.bits()));
    j["fidelity"] = {{"plateau", run.fidelity.plateau}, {"T_of", optional_json(run.fidelity.t_of)},
                     {"knee_width", optional_json(run.knee)}};
    j["work_echo"] = {{"plateau", run.work.plateau},
                      {"saturation", optional_json(run.work_saturation)},
                      {"T_of", optional_json(run.work.t_of)}};
    const auto diff = compare_observables(run.fidelity, run.work);
    j["onset_difference"] = optional_json(diff);
    runs.push_back(j);
    summary << std::left << std::setw(10) << to_string(ctx.backend()) << std::right << std::setw(5)
            << ctx.bits() << std::fixed << std::setprecision(4) << std::setw(12) << run.fidelity.plateau
            << std::setw(10) << fmt(run.fidelity.t_of) << std::setw(16) << run.work.plateau
            << std::setw(12) << fmt(run.work_saturation, 4) << std::setw(14) << fmt(run.work.t_of)
            << std::setw(13) << fmt(run.knee) << "\n";
  }
  json doc;
  doc["spec"] = spec_json(cfg.spec);
  doc["runs"] = runs;
  write_output(cfg, "echo_summary.json", doc.dump(2) + "\n", r.files);
  r.summary = summary.str();
  return r;
}

CommandResult cmd_scaling(const RunConfig& cfg) {
  CommandResult r;
  const MatrixSpec h = MatrixSpec::from_dimer(cfg.spec);
  const auto ctxs = contexts(cfg);
  std::vector<EchoRun> runs;
  runs.reserve(ctxs.size());
  for (const auto& ctx : ctxs) runs.push_back(run_echo(cfg, h, ctx, 1.6));

  CsvWriter csv({"m", "backend", "observable", "T_of_measured", "T_of_exact", "T_dr"});
  for (Observable obs : {Observable::Fidelity, Observable::WorkEcho}) {
    for (const auto& run : runs) {
      const auto& est = obs == Observable::Fidelity ? run.fidelity : run.work;
      csv.row_strings({std::to_string(run.ctx.bits()), to_string(run.ctx.backend()), to_string(obs),
                       csv_number(est.t_of), csv_number(t_of_exact_of(cfg.spec, run.ctx.bits())),
                       csv_number(t_dr_of(cfg.spec, run.ctx.bits()))});
    }
  }
  write_output(cfg, "scaling.csv", csv.str(), r.files);

  std::ostringstream summary;
  json fits = json::object();
  const bool broken = cfg.spec.phase() == Phase::Broken;
  const double expected_slope = broken ? std::log(2.0) / delta_b(cfg.spec) : NAN;
  const auto oracle_shift = [&]() -> std::optional<double> {
    if (!broken || !cfg.spec.is_symmetric()) return std::nullopt;
    return -std::log(Oracle(cfg.spec).prefactor()) / delta_b(cfg.spec);
  }();
  for (Observable obs : {Observable::Fidelity, Observable::WorkEcho}) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& run : runs) {
      const auto& est = obs == Observable::Fidelity ? run.fidelity : run.work;
      if (run.ctx.backend() == Backend::Software && est.t_of) pts.emplace_back(run.ctx.bits(), *est.t_of);
    }
    json f;
    f["expected_slope"] = broken ? json(expected_slope) : json(nullptr);
    f["expected_intercept"] = optional_json(oracle_shift);
    if (pts.size() < 3) {
      f["fit"] = nullptr;
      f["note"] = "fewer than 3 software onsets found";
      summary << to_string(obs) << ": fewer than 3 onsets, no fit\n";
      fits[to_string(obs)] = f;
      continue;
    }
    const ScalingFit fit = fit_scaling(pts);
    json p = json::array();
    for (const auto& [m, t] : fit.points) p.push_back({m, t});
    f["points"] = p;
    f["slope"] = fit.slope;
    f["intercept"] = fit.intercept;
    f["max_abs_residual"] = fit.max_abs_residual;
    f["slope_ratio"] = broken ? json(fit.slope / expected_slope) : json(nullptr);
    json natives = json::array();
    for (const auto& run : runs) {
      if (run.ctx.backend() == Backend::Software) continue;
      const auto& est = obs == Observable::Fidelity ? run.fidelity : run.work;
      const double pred = fit.predict(run.ctx.bits());
      natives.push_back({{"backend", to_string(run.ctx.backend())},
                         {"m", run.ctx.bits()},
                         {"T_of_measured", optional_json(est.t_of)},
                         {"T_of_fit", pred},
                         {"relative_deviation", est.t_of ? json(std::abs(*est.t_of - pred) / pred) : json(nullptr)}});
    }
    f["native"] = natives;
    fits[to_string(obs)] = f;
    summary << std::fixed << std::setprecision(4) << to_string(obs) << ": slope " << fit.slope;
    if (broken) summary << " (" << std::setprecision(1) << 100.0 * fit.slope / expected_slope << "% of ln2/Delta_b)";
    summary << std::setprecision(3) << ", intercept " << fit.intercept << ", max |residual| "
            << fit.max_abs_residual << "\n";
  }
  summary << "     m  backend    T_of(F)  T_of(eta_W)  T_of_exact     T_dr\n";
  for (const auto& run : runs) {
    summary << std::setw(6) << run.ctx.bits() << "  " << std::left << std::setw(9) << to_string(run.ctx.backend())
            << std::right << std::setw(9) << fmt(run.fidelity.t_of) << std::setw(13) << fmt(run.work.t_of)
            << std::setw(12) << fmt(t_of_exact_of(cfg.spec, run.ctx.bits())) << std::setw(9)
            << fmt(broken ? std::optional<double>(t_dr_of(cfg.spec, run.ctx.bits())) : std::nullopt) << "\n";
  }
  json doc;
  doc["spec"] = spec_json(cfg.spec);
  doc["fits"] = fits;
  write_output(cfg, "scaling_fit.json", doc.dump(2) + "\n", r.files);
  r.summary = summary.str();
  return r;
}

CommandResult cmd_benchmark(const RunConfig& cfg) {
  CommandResult r;
  const double lambda = cfg.spec.eta();
  const std::pair<const char*, MatrixSpec> members[] = {
      {"pt", MatrixSpec::from_dimer(cfg.spec)},
      {"normal", MatrixSpec::diagonal({{0.0, lambda}, {0.0, -lambda}})},
      {"hermitian", MatrixSpec::real_diagonal({lambda, -lambda})}};
  CsvWriter verdict({"backend", "m", "member", "min_F", "F_final", "T_of", "ln_kappa_final", "verdict"});
  std::ostringstream summary;
  summary << "backend        m  member       min F        T_of   ln kappa(end)  verdict\n";
  for (const auto& ctx : contexts(cfg)) {
    for (const auto& [name, h] : members) {
      const EchoRun run = run_echo(cfg, h, ctx, 2.0);
      CsvWriter w({"tau", "F", "ln_kappa"});
      double min_f = 1.0, max_abs_lk = 0.0;
      for (const auto& s : run.curve.samples) {
        w.row_strings({csv_number(s.tau), csv_number(s.fidelity), csv_number(s.ln_kappa)});
        min_f = std::min(min_f, s.fidelity);
        max_abs_lk = std::max(max_abs_lk, std::abs(s.ln_kappa));
      }
      write_output(cfg, std::string("benchmark_") + name + "_" + run_tag(ctx) + ".csv", w.str(), r.files);
      const auto& last = run.curve.samples.back();
      std::string v;
      if (run.fidelity.t_of) {
        v = "collapses";
      } else if (max_abs_lk < 1e-9) {
        v = "survives_kappa_identity";
      } else {
        v = "survives";
      }
      verdict.row_strings({to_string(ctx.backend()), std::to_string(ctx.bits()), name, csv_number(min_f),
                           csv_number(last.fidelity), csv_number(run.fidelity.t_of), csv_number(last.ln_kappa), v});
      summary << std::left << std::setw(10) << to_string(ctx.backend()) << std::right << std::setw(5) << ctx.bits()
              << "  " << std::left << std::setw(10) << name << std::right << std::scientific << std::setprecision(4)
              << std::setw(12) << min_f << std::fixed << std::setw(12) << fmt(run.fidelity.t_of) << std::setw(16)
              << std::setprecision(3) << last.ln_kappa << "  " << v << "\n";
    }
  }
  write_output(cfg, "benchmark_verdict.csv", verdict.str(), r.files);
  r.summary = summary.str();
  return r;
}

CommandResult execute(const RunConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  CommandResult r;
  switch (cfg.command) {
    case Command::KappaCurve: r = cmd_kappa_curve(cfg); break;
    case Command::Echo: r = cmd_echo(cfg); break;
    case Command::Scaling: r = cmd_scaling(cfg); break;
    case Command::Benchmark: r = cmd_benchmark(cfg); break;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json manifest;
  manifest["artifact"] = "pirlab";
  manifest["version"] = PIRLAB_VERSION;
  manifest["command"] = to_string(cfg.command);
  manifest["config"] = config_object(cfg);
  json derived;
  derived["spec"] = spec_json(cfg.spec);
  json eps = json::array();
  for (const auto& ctx : contexts(cfg)) eps.push_back(context_json(ctx));
  derived["contexts"] = eps;
  manifest["derived"] = derived;
  json outputs = json::array();
  for (const auto& f : r.files) {
    outputs.push_back({{"file", f.filename().string()},
                       {"sha256", sha256_hex(f)},
                       {"bytes", static_cast<std::uintmax_t>(fs::file_size(f))}});
  }
  manifest["outputs"] = outputs;
  manifest["timing"] = {{"wall_seconds", wall}, {"threads", cfg.threads}};
  const fs::path mpath = cfg.out / "manifest.json";
  write_atomic(mpath, manifest.dump(2) + "\n");
  r.files.push_back(mpath);
  return r;
}

int exit_code(Errc code) noexcept {
  switch (code) {
    case Errc::configuration:
    case Errc::phase:
    case Errc::exceptional_point:
    case Errc::domain: return 1;
    case Errc::io: return 2;
    case Errc::arithmetic:
    case Errc::conditioning:
    case Errc::fit:
    case Errc::comparison:
    case Errc::internal: return 3;
  }
  return 3;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-precision echo experiments on non-Hermitian dimers"};
  app.set_version_flag("--version", std::string(PIRLAB_VERSION));
  app.require_subcommand(1);

  RunConfig cfg;
  cfg.threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<int> ms;
  std::vector<std::string> backends;
  std::string h0, psi0, route, window;
  std::optional<double> tau_max;
  std::string config_path;

  const std::pair<Command, const char*> commands[] = {
      {Command::KappaCurve, "ln kappa(U(t)) from the SVD against the closed form, with overflow thresholds"},
      {Command::Echo, "forward/backward echo curves per (backend, m)"},
      {Command::Scaling, "overflow-time sweep over m with a least-squares fit"},
      {Command::Benchmark, "PT / normal / Hermitian trio with matched spectra"}};
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(to_string(cmd), help);
    sub->add_option("--gamma", cfg.spec.gamma, "gain/loss rate")->capture_default_str();
    sub->add_option("--g1", cfg.spec.g1, "upper coupling")->capture_default_str();
    sub->add_option("--g2", cfg.spec.g2, "lower coupling")->capture_default_str();
    sub->add_option("--m", ms, "significand bits (repeatable or comma-separated)")->delimiter(',');
    sub->add_option("--backend", backends, "software | native32 | native64 (repeatable)")->delimiter(',');
    sub->add_option("--dt", cfg.dt, "evolution step")->capture_default_str();
    sub->add_option("--tau-start", cfg.tau_start, "first tau")->capture_default_str();
    sub->add_option("--tau-max", tau_max, "last tau (default depends on command)");
    sub->add_option("--tau-step", cfg.tau_step, "tau grid spacing")->capture_default_str();
    sub->add_option("--h0", h0, "readout diagonal, e.g. \"2,-2\"");
    sub->add_option("--psi0", psi0, "initial state amplitudes, e.g. \"1,0.01\"");
    sub->add_option("--route", route, "propagator: closed_form | eigen | series");
    sub->add_option("--plateau-window", window, "onset plateau window \"t_lo,t_hi\"");
    sub->add_option("--drop", cfg.onset.drop_fraction, "onset drop fraction")->capture_default_str();
    sub->add_option("--svd-bits", cfg.svd_bits, "precision of the kappa-curve SVD")->capture_default_str();
    sub->add_option("--threads", cfg.threads, "worker threads");
    sub->add_option("--out", cfg.out, "output directory")->capture_default_str();
    sub->add_option("--config", config_path, "key = value file; its entries override flags");
    subs.emplace_back(sub, cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? 0 : 1;
  }

  try {
    for (const auto& [sub, cmd] : subs)
      if (sub->parsed()) cfg.command = cmd;
    if (!ms.empty()) cfg.ms = ms;
    for (const auto& b : backends) cfg.backends.push_back(backend_from_string(b));
    if (tau_max) cfg.tau_max = tau_max;
    if (!h0.empty()) set_key(cfg, "h0", h0);
    if (!psi0.empty()) set_key(cfg, "psi0", psi0);
    if (!route.empty()) set_key(cfg, "route", route);
    if (!window.empty()) set_key(cfg, "plateau_window", window);
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    const CommandResult r = execute(cfg);
    out << r.summary;
    out << "wrote " << r.files.size() << " files to " << cfg.out.string() << "\n";
    return 0;
  } catch (const Error& e) {
    err << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error (internal): " << e.what() << "\n";
    return 3;
  }
}

}  // namespace pir::cli
