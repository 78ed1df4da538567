// subexp-wavelets: builds wavelet systems, reruns certificates and drives the
// projection, expansion, decay and Parseval experiments.
//
// Exit codes: 0 ok, 1 check failure, 2 config error, 3 I/O or corrupt input.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "subexp/subexp.hpp"

namespace fs = std::filesystem;
using namespace subexp;

namespace {

enum Exit : int { exit_ok = 0, exit_check = 1, exit_config = 2, exit_io = 3 };

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr const char* schema_version = "1";

// ---------------------------------------------------------------------------
// Config files: a JSON object whose keys are long flag names (dashes or
// underscores). Flags given on the command line win.

void apply_config(CLI::App& cmd, const std::string& path) {
  json cfg;
  try {
    cfg = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : cfg.items()) {
    if (key == "schema_version") {
      if (value != schema_version) throw ConfigError("unsupported schema_version in config");
      continue;
    }
    std::string flag = key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (flag == "config") throw ConfigError("config files cannot nest");
    CLI::Option* opt = cmd.get_option_no_throw("--" + flag);
    if (!opt) throw ConfigError("unknown config key '" + key + "'");
    if (opt->count() > 0) continue;
    auto to_text = [&](const json& v) -> std::string {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
      if (v.is_number_integer()) return std::to_string(v.get<long long>());
      if (v.is_number()) return format17(v.get<double>());
      throw ConfigError("config key '" + key + "' has an unsupported value type");
    };
    try {
      if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) joined += (joined.empty() ? "" : ",") + to_text(v);
        opt->add_result(joined);
      } else {
        opt->add_result(to_text(value));
      }
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Small parsers

double parse_number(const std::string& s, const char* what) {
  try {
    return detail::parse_real(s);
  } catch (const PreconditionError&) {
    throw ConfigError(std::string("cannot parse ") + what + " '" + s + "'");
  }
}

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
  const auto parts = detail::split(s, ',');
  if (parts.size() != 2) throw ConfigError(std::string(what) + " must be two comma-separated values");
  return {parse_number(parts[0], what), parse_number(parts[1], what)};
}

IndexWindow parse_window(const std::string& s) {
  const auto [M, N] = parse_pair(s, "window");
  if (M != std::floor(M) || N != std::floor(N) || M < 0 || N < 0)
    throw ConfigError("window must be two nonnegative integers M,N");
  return IndexWindow(static_cast<int>(M), static_cast<long>(N));
}

std::pair<int, int> parse_levels(const std::string& s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const double v = parse_number(s, "levels");
    return {static_cast<int>(v), static_cast<int>(v)};
  }
  const double lo = parse_number(s.substr(0, dots), "levels");
  const double hi = parse_number(s.substr(dots + 2), "levels");
  if (lo != std::floor(lo) || hi != std::floor(hi) || lo < 0 || hi < lo)
    throw ConfigError("levels must look like 0..6");
  return {static_cast<int>(lo), static_cast<int>(hi)};
}

TestFunction parse_function(const std::string& spec, const WaveletSystem* ws) {
  try {
    return parse_test_function(spec, ws);
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

Grid1D symmetric_grid(double half_width, double spacing) {
  if (!(half_width > 0.0) || !(spacing > 0.0)) throw ConfigError("grid half width and spacing must be positive");
  return Grid1D::span(-half_width, half_width, spacing);
}

// ---------------------------------------------------------------------------
// Reports

struct Report {
  std::string command;
  json parameters = json::object();
  json result = json::object();
  std::string digest;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  json to_json() const {
    char stamp[32];
    const std::time_t now = std::time(nullptr);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {{"command", command},
            {"schema_version", schema_version},
            {"system_digest", digest},
            {"parameters", parameters},
            {"result", result},
            {"metadata", {{"generated_at", stamp}, {"elapsed_seconds", elapsed}, {"threads", worker_count()}}}};
  }

  void emit(const fs::path& out_dir) const {
    const std::string text = to_json().dump(2) + "\n";
    write_text((out_dir / (command + "_report.json")).string(), text);
    std::cout << text;
  }
};

json certificate_json(const Certificate& c) {
  return {{"passed", c.passed}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"detail", c.detail}};
}

json fit_json(const DecayFit& f) {
  return {{"amplitude_C", f.amplitude_C},
          {"rate_c", f.rate_c},
          {"exponent", f.exponent},
          {"r_squared", f.r_squared},
          {"n_envelope_points", f.n_envelope_points}};
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create output directory " + dir.string());
}

struct SystemHandle {
  WaveletSystem ws;
  std::string digest;
};

SystemHandle open_system(const std::string& path) {
  auto loaded = load_system(path);
  if (!loaded.digest_matches)
    std::cerr << "warning: stored digest of " << path << " does not match its contents\n";
  SystemHandle h{std::move(loaded.system), {}};
  h.digest = certificate_digest(h.ws);
  return h;
}

// ---------------------------------------------------------------------------
// Commands

struct Common {
  std::string config;
  std::string out = ".";
  std::string system;

  std::string system_path() const { return system.empty() ? (fs::path(out) / "system.json").string() : system; }
};

void add_common(CLI::App& cmd, Common& c, bool needs_system) {
  cmd.add_option("--config", c.config, "JSON config; flags override its keys");
  cmd.add_option("--out", c.out, "Output directory");
  if (needs_system) cmd.add_option("--system", c.system, "System file (default <out>/system.json)");
}

struct BuildArgs {
  double a = 1.0;
  double rho2 = 2.0;
  std::size_t points_per_period = 2730;
  double window_half_width = 40.0;
  std::string sample_spacing = "1/32";
  double atom_cutoff = 512.0;
};

int cmd_build(const Common& c, const BuildArgs& b) {
  if (!std::isfinite(b.a) || !(b.a > 0.0) || !(b.a < pi / 3.0))
    throw ConfigError("a must satisfy 0 < a < pi/3 (got " + format17(b.a) + ")");
  if (!std::isfinite(b.rho2) || !(b.rho2 > 1.0))
    throw ConfigError("rho2 must satisfy rho2 > 1; no scaling function exists otherwise (got " + format17(b.rho2) + ")");
  if (b.points_per_period < 64) throw ConfigError("points-per-period must be at least 64");
  BuildOptions opt;
  opt.points_per_period = b.points_per_period;
  opt.window_half_width = b.window_half_width;
  opt.sample_spacing = parse_number(b.sample_spacing, "sample-spacing");
  opt.atom_cutoff = b.atom_cutoff;

  Report rep;
  rep.command = "build";
  rep.parameters = {{"a", b.a},
                    {"rho2", b.rho2},
                    {"points_per_period", b.points_per_period},
                    {"window_half_width", opt.window_half_width},
                    {"sample_spacing", opt.sample_spacing},
                    {"atom_cutoff", opt.atom_cutoff}};
  const WaveletSystem ws = build_wavelet_system(b.a, b.rho2, opt);
  const fs::path dir(c.out);
  ensure_dir(dir);
  save_system(ws, (dir / "system.json").string());
  write_text((dir / "psi.csv").string(), samples_csv(ws.psi_samples));
  write_text((dir / "phi.csv").string(), samples_csv(ws.phi_samples));
  rep.digest = certificate_digest(ws);
  json certs = json::object();
  for (const auto& [name, cert] : ws.certificates) certs[name] = certificate_json(cert);
  rep.result = {{"certificates", certs}, {"all_passed", ws.all_certificates_pass()}};
  write_text((dir / "certificates.json").string(), certs.dump(2) + "\n");
  rep.emit(dir);
  return ws.all_certificates_pass() ? exit_ok : exit_check;
}

const std::vector<std::string> verify_suites = {"support",       "shift-orthonormality", "moments",
                                                "two-scale-cross", "realness",           "scaling-lowpass",
                                                "kernel-decay",  "polynomial-reproduction"};

int cmd_verify(const Common& c, const std::string& suite) {
  std::vector<std::string> selected;
  if (suite == "all") {
    selected = verify_suites;
  } else if (std::find(verify_suites.begin(), verify_suites.end(), suite) != verify_suites.end()) {
    selected = {suite};
  } else {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  auto loaded = load_system(c.system_path());
  const WaveletSystem& ws = loaded.system;
  Report rep;
  rep.command = "verify";
  rep.digest = certificate_digest(ws);
  rep.parameters = {{"suite", suite}};
  json checks = json::object();
  bool all = true;
  auto record = [&](const std::string& name, const Certificate& cert) {
    checks[name] = certificate_json(cert);
    all = all && cert.passed;
  };
  std::optional<ProjectionKernel> pk;
  auto kernel = [&]() -> const ProjectionKernel& {
    if (!pk) pk = make_projection_kernel(ws, 0);
    return *pk;
  };
  for (const auto& s : selected) {
    if (s == "support") record("SUPPORT", certify::support(ws));
    if (s == "shift-orthonormality") {
      record("SHIFT-ORTHONORMALITY-PSI", certify::shift_orthonormality(ws, Atom::wavelet));
      record("SHIFT-ORTHONORMALITY-PHI", certify::shift_orthonormality(ws, Atom::scaling));
    }
    if (s == "moments") record("MOMENTS", certify::moments(ws));
    if (s == "two-scale-cross") record("TWO-SCALE-CROSS", certify::two_scale_cross(ws));
    if (s == "realness") record("REALNESS", certify::realness(ws));
    if (s == "scaling-lowpass") record("SCALING-LOWPASS", certify::scaling_lowpass(ws));
    if (s == "kernel-decay") {
      const auto kd = kernel_decay_certificate(kernel());
      Certificate cert;
      cert.measured = kd.fit.r_squared;
      cert.tolerance = 0.95;
      cert.passed = kd.fit.rate_c > 0.0 && kd.fit.r_squared > 0.95;
      cert.detail = "rate c = " + sci(kd.fit.rate_c) + " at exponent " + sci(kd.fit.exponent) + ", K = " +
                    std::to_string(kernel().truncation_radius);
      record("KERNEL-DECAY", cert);
    }
    if (s == "polynomial-reproduction") {
      const auto pr = polynomial_reproduction(kernel(), 1);
      Certificate cert;
      cert.measured = std::max(pr.max_deviation[0], pr.max_deviation[1]);
      cert.tolerance = 1e-8;
      cert.passed = cert.measured < cert.tolerance;
      cert.detail = "degree 0 " + sci(pr.max_deviation[0]) + ", degree 1 " + sci(pr.max_deviation[1]) + " over " +
                    std::to_string(pr.probes) + " probes";
      record("POLYNOMIAL-REPRODUCTION", cert);
    }
  }
  rep.result = {{"checks", checks},
                {"all_passed", all},
                {"stored_digest", loaded.stored_digest},
                {"stored_digest_matches", loaded.digest_matches}};
  const fs::path dir(c.out);
  ensure_dir(dir);
  rep.emit(dir);
  return all ? exit_ok : exit_check;
}

struct ProjectArgs {
  std::string f = "gaussian";
  std::string levels = "0..6";
  double half_width = 8.0;
  std::string spacing = "1/64";
  double h = 1.0;
  double c = 0.5;
  double rho1 = 1.0;
  double rho2 = 0.0;  // 0: use the system's rho2
  int max_beta = 8;
  double probe_half_width = 10.0;
  double probe_step = 0.125;
  bool quadrature_check = true;
};

int cmd_project(const Common& c, const ProjectArgs& p) {
  const auto sys = open_system(c.system_path());
  const auto [lo, hi] = parse_levels(p.levels);
  const TestFunction f = parse_function(p.f, &sys.ws);
  const Grid1D grid = symmetric_grid(p.half_width, parse_number(p.spacing, "spacing"));
  SeminormParams sp{p.rho1, p.rho2 > 0.0 ? p.rho2 : sys.ws.rho2, p.h, p.c, p.max_beta};
  std::vector<double> probes;
  for (double x = -p.probe_half_width; x <= p.probe_half_width + 1e-12; x += p.probe_step) probes.push_back(x);
  ConvergenceInput in{f.sample(grid), f.spectrum, f.spectral_half_width};
  const auto table = mra_convergence_experiment(sys.ws, in, hi, sp, probes, p.quadrature_check);

  Report rep;
  rep.command = "project";
  rep.digest = sys.digest;
  rep.parameters = {{"f", f.name},         {"levels", {lo, hi}},  {"half_width", p.half_width},
                    {"spacing", grid.spacing}, {"h", sp.h},        {"c", sp.c},
                    {"rho1", sp.rho1},     {"rho2", sp.rho2},     {"max_beta", sp.max_beta},
                    {"probe_half_width", p.probe_half_width}, {"probe_step", p.probe_step}};
  CsvWriter csv({"m", "sup_error", "seminorm", "boundary_mass", "quadrature_error"});
  json rows = json::array();
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  bool warned = false;
  for (const auto& r : table.rows) {
    if (r.m < lo) continue;
    csv.row({static_cast<double>(r.m), r.sup_error, r.seminorm, r.boundary_mass, r.quadrature_error});
    rows.push_back({{"m", r.m},
                    {"sup_error", r.sup_error},
                    {"seminorm", r.seminorm},
                    {"boundary_mass", r.boundary_mass},
                    {"quadrature_error", r.quadrature_error}});
    if (r.sup_error > prev) monotone = false;
    prev = r.sup_error;
    warned = warned || r.boundary_mass > boundary_warning_level;
  }
  rep.result = {{"rows", rows},
                {"sup_error_monotone", monotone},
                {"boundary_warning", warned},
                {"note", "sup norms are lower bounds over the sample grid"}};
  const fs::path dir(c.out);
  ensure_dir(dir);
  csv.save((dir / "project.csv").string());
  rep.emit(dir);
  return exit_ok;
}

struct ExpandArgs {
  std::string f = "gevrey-band:pi,2pi";
  std::string g;  // Parseval partner; default conj of f
  std::string window = "6,32";
  double half_width = 256.0;
  std::string spacing = "1/128";
  bool parseval = false;
  double tolerance = 1e-5;
  double s = 3.0, t = 4.0, rho1 = 0.0, rho2 = 2.0, k = 0.5;
  double budget_factor = 10.0;
};

json sequence_json(const CoefficientSet& cs, const ExpandArgs& e) {
  SequenceNormParams sp{e.s, e.t, e.rho1, e.rho2, e.k};
  try {
    sp.validate();
  } catch (const PreconditionError& err) {
    throw ConfigError(err.what());
  }
  const auto norm = sequence_norm_report(cs, sp);
  const double budget = e.budget_factor * cs.sup_abs();
  const auto fk = max_feasible_k(cs, sp, budget);
  return {{"s", e.s},
          {"t", e.t},
          {"rho1", e.rho1},
          {"rho2", e.rho2},
          {"k", e.k},
          {"sequence_norm", norm.value},
          {"skipped_coefficients", norm.skipped},
          {"budget", budget},
          {"max_feasible_k", fk.k},
          {"vacuous", fk.vacuous}};
}

int cmd_expand(const Common& c, const ExpandArgs& e) {
  const auto sys = open_system(c.system_path());
  const IndexWindow window = parse_window(e.window);
  const TestFunction f = parse_function(e.f, &sys.ws);
  const Grid1D grid = symmetric_grid(e.half_width, parse_number(e.spacing, "spacing"));
  const SampledFunction fs_ = f.sample(grid);
  const auto ar = analyze_report(sys.ws, fs_, window, {});
  const auto& cs = ar.coefficients;
  const auto partial = synthesize_partial(sys.ws, cs, grid);
  double sup_err = 0.0;
  for (std::size_t i = 0; i < grid.count; ++i) sup_err = std::max(sup_err, std::abs(partial[i] - fs_[i]));
  const double energy = cs.energy();
  const double norm_sq = std::pow(l2_norm(fs_), 2);
  const bool bessel = energy <= norm_sq * (1.0 + 1e-9);

  Report rep;
  rep.command = "expand";
  rep.digest = sys.digest;
  rep.parameters = {{"f", f.name}, {"window", {window.M, window.N}}, {"half_width", e.half_width},
                    {"spacing", grid.spacing}, {"parseval", e.parseval}, {"tolerance", e.tolerance}};
  rep.result = {{"coefficient_count", cs.coefficients.size()},
                {"energy", energy},
                {"norm_f_sq", norm_sq},
                {"bessel_holds", bessel},
                {"partial_sum_sup_error", sup_err},
                {"route_gap", ar.max_route_gap},
                {"sequence", sequence_json(cs, e)}};
  bool ok = bessel;
  if (e.parseval) {
    const TestFunction g = parse_function(e.g.empty() ? "conj:" + e.f : e.g, &sys.ws);
    const auto pr = parseval_check(sys.ws, fs_, cs, g.sample(grid));
    rep.parameters["g"] = g.name;
    rep.result["parseval"] = {{"lhs_re", pr.lhs.real()}, {"lhs_im", pr.lhs.imag()}, {"rhs_re", pr.rhs.real()},
                              {"rhs_im", pr.rhs.imag()}, {"gap", pr.gap},            {"within_tolerance", pr.gap < e.tolerance}};
    ok = ok && pr.gap < e.tolerance;
  }
  CsvWriter csv({"epsilon", "m", "n", "re", "im"});
  for (const auto& [idx, z] : cs.coefficients)
    csv.row({static_cast<double>(idx.epsilon), static_cast<double>(idx.m), static_cast<double>(idx.n[0]), z.real(), z.imag()});
  const fs::path dir(c.out);
  ensure_dir(dir);
  csv.save((dir / "coefficients.csv").string());
  rep.emit(dir);
  return ok ? exit_ok : exit_check;
}

struct DecayArgs {
  std::string target = "psi";
  std::string exponent = "free";
  std::string range = "5,40";
  std::size_t points = 641;
};

int cmd_decay(const Common& c, const DecayArgs& d) {
  const auto sys = open_system(c.system_path());
  ExponentMode mode = ExponentMode::free_search();
  if (d.exponent != "free") {
    const double e = parse_number(d.exponent, "exponent");
    if (!(e > 0.0)) throw ConfigError("exponent must be positive or 'free'");
    mode = ExponentMode::fixed(e);
  }
  const auto [lo, hi] = parse_pair(d.range, "range");
  if (!(lo >= 0.0) || !(hi > lo)) throw ConfigError("range must satisfy 0 <= lo < hi");
  std::vector<DecaySample> samples;
  if (d.target == "psi" || d.target == "phi") {
    if (d.points < 2) throw ConfigError("points must be at least 2");
    for (const auto& p : decay_profile(sys.ws, hi, d.points, d.target == "psi" ? Atom::wavelet : Atom::scaling))
      if (p.x >= lo) samples.push_back({p.x, p.magnitude});
  } else if (d.target == "kernel") {
    const auto pk = make_projection_kernel(sys.ws, 0);
    for (const auto& s : kernel_decay_certificate(pk, 8, hi).samples)
      if (s.x >= lo) samples.push_back(s);
  } else {
    throw ConfigError("target must be psi, phi or kernel");
  }
  const DecayFit fit = subexp_decay_fit(samples, mode);
  const DecayFit exp_fit = subexp_decay_fit(samples, ExponentMode::fixed(1.0));

  Report rep;
  rep.command = "decay";
  rep.digest = sys.digest;
  rep.parameters = {{"target", d.target}, {"exponent", d.exponent}, {"range", {lo, hi}}, {"points", d.points}};
  rep.result = {{"fit", fit_json(fit)},
                {"exponential_fit", fit_json(exp_fit)},
                {"subexponential_preferred", fit.r_squared > exp_fit.r_squared}};
  CsvWriter csv({"x", "value"});
  for (const auto& s : samples) csv.row({s.x, s.value});
  const fs::path dir(c.out);
  ensure_dir(dir);
  csv.save((dir / "decay.csv").string());
  rep.emit(dir);
  return exit_ok;
}

struct ParsevalArgs {
  std::string f = "gevrey-band:pi,2pi";
  std::string g = "conj:gevrey-band:1.2pi,2.2pi";
  std::string window = "6,32";
  double half_width = 256.0;
  std::string spacing = "1/128";
  double tolerance = 1e-5;
};

int cmd_parseval(const Common& c, const ParsevalArgs& p) {
  const auto sys = open_system(c.system_path());
  const IndexWindow window = parse_window(p.window);
  const TestFunction f = parse_function(p.f, &sys.ws);
  const TestFunction g = parse_function(p.g, &sys.ws);
  const Grid1D grid = symmetric_grid(p.half_width, parse_number(p.spacing, "spacing"));
  const auto pr = parseval_check(sys.ws, f.sample(grid), g.sample(grid), window);
  const bool bessel = pr.bessel_f <= pr.norm_f_sq * (1.0 + 1e-9);
  Report rep;
  rep.command = "parseval";
  rep.digest = sys.digest;
  rep.parameters = {{"f", f.name}, {"g", g.name}, {"window", {window.M, window.N}}, {"half_width", p.half_width},
                    {"spacing", grid.spacing}, {"tolerance", p.tolerance}};
  rep.result = {{"lhs_re", pr.lhs.real()}, {"lhs_im", pr.lhs.imag()}, {"rhs_re", pr.rhs.real()},
                {"rhs_im", pr.rhs.imag()}, {"gap", pr.gap},            {"bessel_f", pr.bessel_f},
                {"norm_f_sq", pr.norm_f_sq}, {"bessel_holds", bessel},  {"within_tolerance", pr.gap < p.tolerance}};
  const fs::path dir(c.out);
  ensure_dir(dir);
  rep.emit(dir);
  return bessel && pr.gap < p.tolerance ? exit_ok : exit_check;
}

int cmd_report(const Common& c, const std::vector<std::string>& inputs) {
  auto loaded = load_system(c.system_path());
  const WaveletSystem& ws = loaded.system;
  Report rep;
  rep.command = "report";
  rep.digest = certificate_digest(ws);
  json certs = json::object();
  for (const auto& [name, cert] : ws.certificates) certs[name] = certificate_json(cert);
  json included = json::array();
  for (const auto& path : inputs) {
    json r;
    try {
      r = json::parse(read_text(path));
    } catch (const json::parse_error& e) {
      throw FormatError("malformed report " + path + ": " + e.what());
    }
    if (!r.is_object() || !r.contains("command") || !r.contains("result"))
      throw FormatError(path + " is not a report");
    const bool same = r.value("system_digest", std::string{}) == rep.digest;
    included.push_back({{"command", r["command"]}, {"same_system", same}, {"result", r["result"]}});
  }
  rep.parameters = {{"inputs", inputs}};
  rep.result = {{"params", {{"a", ws.a}, {"rho2", ws.rho2}}},
                {"stored_certificates", certs},
                {"stored_certificates_pass", ws.all_certificates_pass()},
                {"stored_digest_matches", loaded.digest_matches},
                {"reports", included}};
  const fs::path dir(c.out);
  ensure_dir(dir);
  rep.emit(dir);
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subexponentially decaying orthonormal wavelets: build, verify and experiment"};
  app.require_subcommand(1);

  Common common;
  BuildArgs build;
  auto* b = app.add_subcommand("build", "Construct a wavelet system and run its certificates");
  add_common(*b, common, false);
  b->add_option("--a", build.a, "Bump half-width, 0 < a < pi/3");
  b->add_option("--rho2", build.rho2, "Gevrey order of the bump, > 1");
  b->add_option("--points-per-period", build.points_per_period, "Spectral samples per 2pi");
  b->add_option("--window-half-width", build.window_half_width, "Half-width of the stored physical samples");
  b->add_option("--sample-spacing", build.sample_spacing, "Spacing of the stored physical samples");
  b->add_option("--atom-cutoff", build.atom_cutoff, "Atoms are treated as 0 beyond this radius");

  std::string suite = "all";
  auto* v = app.add_subcommand("verify", "Rerun certificate suites on a stored system");
  add_common(*v, common, true);
  v->add_option("--suite", suite, "support, shift-orthonormality, moments, two-scale-cross, realness, "
                                  "scaling-lowpass, kernel-decay, polynomial-reproduction or all");

  ProjectArgs proj;
  auto* p = app.add_subcommand("project", "Convergence of q_m f to f across levels");
  add_common(*p, common, true);
  p->add_option("--f", proj.f, "Test function");
  p->add_option("--levels", proj.levels, "Level range, e.g. 0..6");
  p->add_option("--half-width", proj.half_width, "Sample window half-width");
  p->add_option("--spacing", proj.spacing, "Sample spacing");
  p->add_option("--seminorm-h", proj.h, "Seminorm h");
  p->add_option("--seminorm-c", proj.c, "Seminorm c");
  p->add_option("--rho1", proj.rho1, "Seminorm rho1");
  p->add_option("--rho2", proj.rho2, "Seminorm rho2 (0: the system's)");
  p->add_option("--max-beta", proj.max_beta, "Highest derivative order in the seminorm");
  p->add_option("--probe-half-width", proj.probe_half_width, "Seminorm probes cover [-w, w]");
  p->add_option("--probe-step", proj.probe_step, "Seminorm probe spacing");
  p->add_option("--quadrature-check", proj.quadrature_check, "Also project by physical-side quadrature");

  ExpandArgs exp;
  auto* e = app.add_subcommand("expand", "Wavelet coefficients, partial sums and sequence norms");
  add_common(*e, common, true);
  e->add_option("--f", exp.f, "Test function");
  e->add_option("--g", exp.g, "Parseval partner (default conj:<f>)");
  e->add_option("--window", exp.window, "Index window M,N");
  e->add_option("--half-width", exp.half_width, "Sample window half-width");
  e->add_option("--spacing", exp.spacing, "Sample spacing");
  e->add_flag("--parseval", exp.parseval, "Also check the Parseval pairing");
  e->add_option("--tolerance", exp.tolerance, "Parseval gap tolerance");
  e->add_option("--s", exp.s, "Sequence norm s");
  e->add_option("--t", exp.t, "Sequence norm t");
  e->add_option("--rho1", exp.rho1, "Sequence norm rho1");
  e->add_option("--rho2", exp.rho2, "Sequence norm rho2");
  e->add_option("--k", exp.k, "Sequence norm k");
  e->add_option("--budget-factor", exp.budget_factor, "Budget for the feasible k, in units of sup|c|");

  DecayArgs dec;
  auto* d = app.add_subcommand("decay", "Envelope fit of |psi|, |phi| or the projection kernel");
  add_common(*d, common, true);
  d->add_option("--target", dec.target, "psi, phi or kernel");
  d->add_option("--exponent", dec.exponent, "free or a fixed exponent");
  d->add_option("--range", dec.range, "Fit range lo,hi");
  d->add_option("--points", dec.points, "Samples on [0, hi] for psi and phi");

  ParsevalArgs par;
  auto* q = app.add_subcommand("parseval", "Parseval pairing of two test functions");
  add_common(*q, common, true);
  q->add_option("--f", par.f, "First function");
  q->add_option("--g", par.g, "Second function");
  q->add_option("--window", par.window, "Index window M,N");
  q->add_option("--half-width", par.half_width, "Sample window half-width");
  q->add_option("--spacing", par.spacing, "Sample spacing");
  q->add_option("--tolerance", par.tolerance, "Gap tolerance");

  std::vector<std::string> inputs;
  auto* r = app.add_subcommand("report", "Summarize a system and collected reports");
  add_common(*r, common, true);
  r->add_option("--include", inputs, "Report files to collect");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? exit_ok : exit_config;
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    if (!common.config.empty()) apply_config(*cmd, common.config);
    if (cmd == b) return cmd_build(common, build);
    if (cmd == v) return cmd_verify(common, suite);
    if (cmd == p) return cmd_project(common, proj);
    if (cmd == e) return cmd_expand(common, exp);
    if (cmd == d) return cmd_decay(common, dec);
    if (cmd == q) return cmd_parseval(common, par);
    if (cmd == r) return cmd_report(common, inputs);
  } catch (const ConfigError& err) {
    std::cerr << "config error: " << err.what() << "\n";
    return exit_config;
  } catch (const FormatError& err) {
    std::cerr << "I/O error: " << err.what() << "\n";
    return exit_io;
  } catch (const PreconditionError& err) {
    std::cerr << "invalid input: " << err.what() << "\n";
    return exit_config;
  } catch (const NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return exit_check;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_check;
  }
  return exit_config;
}
