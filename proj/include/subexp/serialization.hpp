#pragma once

// JSON ("dhws-v1") persistence of wavelet systems, certificate digests and CSV output.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "dh_construction.hpp"
#include "numerics.hpp"

namespace subexp {

using json = nlohmann::json;

inline constexpr const char* system_format = "dhws-v1";

/// 17 significant digits, round-trip safe.
inline std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace detail {

inline json spectrum_to_json(const SpectrumOnBand& s) {
  json re = json::array(), im = json::array(), sup = json::array();
  for (const auto& z : s.values()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  for (const auto& iv : s.support()) sup.push_back({iv.lo, iv.hi});
  return {{"re", re}, {"im", im}, {"support", sup}};
}

inline double finite_number(const json& j, const char* what) {
  if (!j.is_number()) throw FormatError(std::string("expected a number for ") + what);
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError(std::string("non-finite value for ") + what);
  return v;
}

inline SpectrumOnBand spectrum_from_json(const json& j, const Grid1D& grid, const char* name) {
  if (!j.is_object()) throw FormatError(std::string(name) + " must be an object");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (!re.is_array() || !im.is_array() || re.size() != grid.count || im.size() != grid.count)
    throw FormatError(std::string(name) + " arrays do not match the spectral grid");
  std::vector<cplx> v(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) v[i] = {finite_number(re[i], name), finite_number(im[i], name)};
  std::vector<Interval> sup;
  for (const auto& iv : j.at("support")) {
    if (!iv.is_array() || iv.size() != 2) throw FormatError(std::string(name) + " support must be [lo, hi] pairs");
    sup.push_back({finite_number(iv[0], name), finite_number(iv[1], name)});
  }
  try {
    return SpectrumOnBand(grid, std::move(v), std::move(sup));
  } catch (const PreconditionError& e) {
    throw FormatError(std::string(name) + ": " + e.what());
  }
}

}  // namespace detail

inline json certificates_to_json(const std::map<std::string, Certificate>& certs) {
  json out = json::object();
  for (const auto& [name, c] : certs)
    out[name] = {{"passed", c.passed}, {"measured", c.measured}, {"tolerance", c.tolerance}, {"detail", c.detail}};
  return out;
}

/// Everything that identifies a system, without the digest itself.
inline json system_body(const WaveletSystem& ws) {
  const Grid1D& g = ws.psi_hat.grid();
  return {{"format", system_format},
          {"params", {{"a", ws.a}, {"rho2", ws.rho2}}},
          {"options",
           {{"points_per_period", ws.options.points_per_period},
            {"window_half_width", ws.options.window_half_width},
            {"sample_spacing", ws.options.sample_spacing},
            {"atom_cutoff", ws.options.atom_cutoff}}},
          {"spectral_grid", {{"origin", g.origin}, {"spacing", g.spacing}, {"count", g.count}}},
          {"psi_hat", detail::spectrum_to_json(ws.psi_hat)},
          {"phi_hat", detail::spectrum_to_json(ws.phi_hat)},
          {"certificates", certificates_to_json(ws.certificates)}};
}

/// FNV-1a over the canonical (sorted-key) dump of the system body.
inline std::string certificate_digest(const WaveletSystem& ws) { return hex64(fnv1a(system_body(ws).dump())); }

inline json system_to_json(const WaveletSystem& ws) {
  json j = system_body(ws);
  j["digest"] = hex64(fnv1a(j.dump()));
  return j;
}

struct LoadedSystem {
  WaveletSystem system;
  std::string stored_digest;
  bool digest_matches = false;
};

/// Parses a "dhws-v1" document. Stored certificates are kept as recorded;
/// they are not rerun here.
inline LoadedSystem system_from_json(const json& j) {
  try {
    if (!j.is_object() || j.value("format", std::string{}) != system_format)
      throw FormatError("not a dhws-v1 document");
    const auto& p = j.at("params");
    const double a = detail::finite_number(p.at("a"), "a");
    const double rho2 = detail::finite_number(p.at("rho2"), "rho2");
    const auto& o = j.at("options");
    BuildOptions opt;
    opt.points_per_period = o.at("points_per_period").get<std::size_t>();
    opt.window_half_width = detail::finite_number(o.at("window_half_width"), "window_half_width");
    opt.sample_spacing = detail::finite_number(o.at("sample_spacing"), "sample_spacing");
    opt.atom_cutoff = detail::finite_number(o.at("atom_cutoff"), "atom_cutoff");
    opt.run_certificates = false;
    const auto& sg = j.at("spectral_grid");
    const Grid1D grid(detail::finite_number(sg.at("origin"), "origin"), detail::finite_number(sg.at("spacing"), "spacing"),
                      sg.at("count").get<std::size_t>());
    if (!(grid.spacing > 0.0) || grid.count < 2) throw FormatError("degenerate spectral grid");
    auto psi = detail::spectrum_from_json(j.at("psi_hat"), grid, "psi_hat");
    auto phi = detail::spectrum_from_json(j.at("phi_hat"), grid, "phi_hat");
    LoadedSystem out;
    try {
      out.system = assemble_system(a, rho2, opt, std::move(psi), std::move(phi));
    } catch (const PreconditionError& e) {
      throw FormatError(std::string("invalid system parameters: ") + e.what());
    }
    out.system.options.run_certificates = true;
    for (const auto& [name, c] : j.at("certificates").items()) {
      Certificate cert;
      cert.passed = c.at("passed").get<bool>();
      cert.measured = c.at("measured").get<double>();
      cert.tolerance = c.at("tolerance").get<double>();
      cert.detail = c.at("detail").get<std::string>();
      out.system.certificates[name] = cert;
    }
    out.stored_digest = j.value("digest", std::string{});
    out.digest_matches = out.stored_digest == certificate_digest(out.system);
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed system file: ") + e.what());
  }
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open " + path + " for writing");
  os << text;
  if (!os) throw FormatError("write to " + path + " failed");
}

inline std::string read_text(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void save_system(const WaveletSystem& ws, const std::string& path) { write_text(path, system_to_json(ws).dump() + "\n"); }

inline LoadedSystem load_system(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw FormatError("malformed system file: " + std::string(e.what()));
  }
  return system_from_json(j);
}

/// CSV with a header row; numbers at 17 significant digits.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : columns_(header.size()) { row_strings(header); }

  void row(std::initializer_list<double> values) {
    if (values.size() != columns_) throw PreconditionError("CSV row width mismatch");
    bool first = true;
    for (double v : values) {
      if (!first) out_ << ',';
      out_ << format17(v);
      first = false;
    }
    out_ << '\n';
  }

  std::string str() const { return out_.str(); }
  void save(const std::string& path) const { write_text(path, str()); }

 private:
  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

  std::size_t columns_;
  std::ostringstream out_;
};

/// Samples of a sampled 1-D function as x,re,im rows.
inline std::string samples_csv(const SampledFunction& f) {
  CsvWriter w({"x", "re", "im"});
  const Grid1D& g = f.grid();
  for (std::size_t i = 0; i < g.count; ++i) w.row({g.point(i), f[i].real(), f[i].imag()});
  return w.str();
}

}  // namespace subexp
