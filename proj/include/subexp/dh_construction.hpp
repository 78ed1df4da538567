#pragma once

// Band-limited orthonormal wavelet built from a Gevrey bump: bell b, wavelet
// spectrum e^{i xi/2} b(xi), scaling spectrum e^{i xi}|phi^(xi)|, physical
// samples, and the stored certificates.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gevrey_bump.hpp"
#include "numerics.hpp"

namespace subexp {

inline constexpr double bell_inner_edge = two_pi / 3.0;
inline constexpr double bell_outer_edge = 4.0 * two_pi / 3.0;
inline constexpr double scaling_edge = 2.0 * two_pi / 3.0;

class BellFunction {
 public:
  BellFunction() = default;
  explicit BellFunction(GevreyBump bump) : bump_(std::move(bump)) {}

  const GevreyBump& bump() const { return bump_; }

  /// Primitive of xi -> bump(xi/2)/2.
  double cumulative2(double xi) const { return bump_.cumulative(0.5 * xi); }

  /// b(xi) = sin(Phi(|xi| - pi)) cos(Phi2(|xi| - 2pi)); the cosine factor is
  /// evaluated as sin(Phi2(2pi - |xi|)) so that it is exactly 0 at the outer edge.
  double operator()(double xi) const {
    const double x = std::abs(xi);
    if (x <= bell_inner_edge || x >= bell_outer_edge) return 0.0;
    return std::sin(bump_.cumulative(x - pi)) * std::sin(cumulative2(two_pi - x));
  }

 private:
  GevreyBump bump_;
};

inline BellFunction build_bell(const GevreyBump& bump) { return BellFunction(bump); }

/// |phi^(xi)|: 1 on |xi| <= 2pi/3, b(2xi) on the transition band, 0 beyond 4pi/3.
inline double scaling_modulus(const BellFunction& bell, double xi) {
  const double x = std::abs(xi);
  if (x <= bell_inner_edge) return 1.0;
  if (x >= scaling_edge) return 0.0;
  return bell(2.0 * x);
}

struct BuildOptions {
  std::size_t points_per_period = 2730;  // spectral samples per 2pi; 2pi shifts stay on the grid
  double window_half_width = 40.0;
  double sample_spacing = 1.0 / 32.0;
  double atom_cutoff = 512.0;  // atoms are treated as 0 beyond this radius
  bool run_certificates = true;
};

struct Certificate {
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct WaveletSystem {
  double a = 1.0;
  double rho2 = 2.0;
  BuildOptions options;
  BellFunction bell;
  SpectrumOnBand psi_hat;
  SpectrumOnBand phi_hat;
  SampledFunction psi_samples;
  SampledFunction phi_samples;
  std::map<std::string, Certificate> certificates;

  const GevreyBump& bump() const { return bell.bump(); }

  bool all_certificates_pass() const {
    return std::all_of(certificates.begin(), certificates.end(), [](const auto& kv) { return kv.second.passed; });
  }
};

enum class Atom { scaling, wavelet };

inline const SpectrumOnBand& spectrum_of(const WaveletSystem& ws, Atom which) {
  return which == Atom::wavelet ? ws.psi_hat : ws.phi_hat;
}

inline Grid1D spectral_grid(std::size_t points_per_period) {
  if (points_per_period < 16) throw PreconditionError("spectral grid too coarse");
  const double h = two_pi / static_cast<double>(points_per_period);
  return Grid1D(-3.0 * pi, h, 3 * points_per_period + 1);
}

inline Grid1D physical_grid(const BuildOptions& opt) {
  return Grid1D::span(-opt.window_half_width, opt.window_half_width, opt.sample_spacing);
}

inline SpectrumOnBand make_psi_hat(const BellFunction& bell, const Grid1D& grid) {
  return SpectrumOnBand::from_function(
      grid, {{-bell_outer_edge, -bell_inner_edge}, {bell_inner_edge, bell_outer_edge}},
      [&](double xi) { return std::polar(bell(xi), 0.5 * xi); });
}

inline SpectrumOnBand make_phi_hat(const BellFunction& bell, const Grid1D& grid) {
  return SpectrumOnBand::from_function(grid, {{-scaling_edge, scaling_edge}},
                                       [&](double xi) { return std::polar(scaling_modulus(bell, xi), xi); });
}

// ---------------------------------------------------------------------------
// Physical-side evaluation

/// Values of g on t_j = t0 + j*step, with g set to 0 where |t| exceeds the cutoff.
inline std::vector<cplx> sample_lattice(const SpectrumOnBand& spec, double cutoff, double t0, double step,
                                        std::size_t count) {
  std::vector<cplx> out(count);
  if (count == 0) return out;
  const double jlo = std::ceil((-cutoff - t0) / step);
  const double jhi = std::floor((cutoff - t0) / step);
  const double first = std::max(0.0, jlo);
  const double last = std::min(static_cast<double>(count - 1), jhi);
  if (first > last) return out;
  const auto j0 = static_cast<std::size_t>(first);
  const auto n = static_cast<std::size_t>(last) - j0 + 1;
  // Coarsen the spectral grid while its alias period stays beyond reach + cutoff.
  const double reach = std::max(std::abs(t0 + first * step), std::abs(t0 + last * step));
  const double period = two_pi / spec.grid().spacing;
  const auto decimation = static_cast<std::size_t>(std::max(1.0, std::floor(period / (reach + cutoff))));
  const auto vals = synthesize_lattice(spec, t0 + static_cast<double>(j0) * step, step, n, decimation);
  std::copy(vals.begin(), vals.end(), out.begin() + static_cast<std::ptrdiff_t>(j0));
  return out;
}

/// Atom (m, n) of one dyadic family: 2^{m/2} g(2^m x - n).
struct DyadicAtom {
  int m = 0;
  long n = 0;
};

/// Samples several dyadic atoms of g on a grid. Atoms of the same level share
/// one lattice table when integer shifts land on table points.
inline std::vector<std::vector<cplx>> sample_atoms(const SpectrumOnBand& spec, double cutoff, const Grid1D& grid,
                                                   std::span<const DyadicAtom> atoms) {
  std::vector<std::vector<cplx>> out(atoms.size());
  std::map<int, std::vector<std::size_t>> by_level;
  for (std::size_t i = 0; i < atoms.size(); ++i) by_level[atoms[i].m].push_back(i);
  for (const auto& [m, members] : by_level) {
    const double scale = std::ldexp(1.0, m);
    const double amp = std::sqrt(scale);
    const double s = scale * grid.spacing;
    const double inv = 1.0 / s;
    const bool shareable = std::abs(inv - std::round(inv)) < 1e-9 && std::round(inv) >= 1.0;
    if (shareable && members.size() > 1) {
      long nmin = atoms[members.front()].n, nmax = nmin;
      for (auto i : members) {
        nmin = std::min(nmin, atoms[i].n);
        nmax = std::max(nmax, atoms[i].n);
      }
      const auto stride = static_cast<long>(std::llround(inv));
      const double t0 = scale * grid.origin - static_cast<double>(nmax);
      const std::size_t count = grid.count + static_cast<std::size_t>((nmax - nmin) * stride);
      const auto table = sample_lattice(spec, cutoff, t0, s, count);
      for (auto i : members) {
        const auto offset = static_cast<std::size_t>((nmax - atoms[i].n) * stride);
        out[i].resize(grid.count);
        for (std::size_t j = 0; j < grid.count; ++j) out[i][j] = amp * table[offset + j];
      }
    } else {
      for (auto i : members) {
        const double t0 = scale * grid.origin - static_cast<double>(atoms[i].n);
        out[i] = sample_lattice(spec, cutoff, t0, s, grid.count);
        for (auto& v : out[i]) v *= amp;
      }
    }
  }
  return out;
}

namespace detail {

inline cplx evaluate_atom(const SpectrumOnBand& spec, double x, int order) {
  const auto d = derivative_spectrum(spec, order);
  const double pt[1] = {x};
  const cplx v = synthesize(d, pt)[0];
  double scale = 0.0;
  for (std::size_t i = 0; i < d.grid().count; ++i) scale += std::abs(d.values()[i]);
  scale *= d.grid().spacing / two_pi;
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, scale))
    throw NumericalError("imaginary residue of a real atom exceeds 1e-10");
  return v;
}

}  // namespace detail

/// psi^(order)(x) by spectral synthesis over the stored spectrum.
inline cplx evaluate_psi(const WaveletSystem& ws, double x, int order = 0) {
  return detail::evaluate_atom(ws.psi_hat, x, order);
}

inline cplx evaluate_phi(const WaveletSystem& ws, double x, int order = 0) {
  return detail::evaluate_atom(ws.phi_hat, x, order);
}

struct DecayPoint {
  double x = 0.0;
  double magnitude = 0.0;
};

/// |psi| on n_points equispaced points of [0, x_max].
inline std::vector<DecayPoint> decay_profile(const WaveletSystem& ws, double x_max, std::size_t n_points,
                                             Atom which = Atom::wavelet) {
  if (!(x_max > 0.0) || x_max > ws.options.window_half_width + 1e-12)
    throw PreconditionError("decay profile exceeds the physical window");
  if (n_points < 2) throw PreconditionError("decay profile needs at least two points");
  const double step = x_max / static_cast<double>(n_points - 1);
  const auto vals = synthesize_lattice(spectrum_of(ws, which), 0.0, step, n_points);
  std::vector<DecayPoint> out(n_points);
  for (std::size_t i = 0; i < n_points; ++i) out[i] = {static_cast<double>(i) * step, std::abs(vals[i])};
  return out;
}

// ---------------------------------------------------------------------------
// Certificates

namespace certify {

inline Certificate support(const WaveletSystem& ws) {
  Certificate c;
  c.tolerance = 0.0;
  std::size_t bad = 0;
  // 100 probes inside the gap around 0, 100 beyond the outer edge.
  for (int i = 0; i < 100; ++i) {
    const double inner = (bell_inner_edge - 1e-9) * (-1.0 + 2.0 * i / 99.0);
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    const double outer = sign * (bell_outer_edge + 1e-9 + 8.0 * i / 99.0);
    for (double xi : {inner, outer}) {
      const double v = ws.bell(xi);
      if (v != 0.0) ++bad;
      c.measured = std::max(c.measured, std::abs(v));
    }
  }
  const Grid1D& g = ws.psi_hat.grid();
  for (std::size_t i = 0; i < g.count; ++i) {
    const double x = std::abs(g.point(i));
    if (x <= bell_inner_edge - 1e-9 || x >= bell_outer_edge + 1e-9) {
      if (ws.psi_hat.values()[i] != cplx{}) ++bad;
      c.measured = std::max(c.measured, std::abs(ws.psi_hat.values()[i]));
    }
  }
  c.passed = bad == 0;
  c.detail = "exact zeros of b at 200 probes and of stored psi^ outside [2pi/3, 8pi/3]; violations: " +
             std::to_string(bad);
  return c;
}

/// max over probes of |sum_k |g^(xi + 2pi k)|^2 - 1| on the stored grid and via
/// the closed form; the stored-grid form needs 2pi to be a whole number of steps.
inline Certificate shift_orthonormality(const WaveletSystem& ws, Atom which, std::size_t probes = 512) {
  Certificate c;
  c.tolerance = 1e-10;
  const SpectrumOnBand& spec = spectrum_of(ws, which);
  const Grid1D& g = spec.grid();
  const double per = two_pi / g.spacing;
  const auto P = static_cast<long>(std::llround(per));
  double stored_dev = 0.0;
  bool stored_ran = false;
  if (std::abs(per - static_cast<double>(P)) < 1e-6) {
    stored_ran = true;
    const long lo = static_cast<long>(std::llround((-pi - g.origin) / g.spacing));
    for (std::size_t p = 0; p < probes; ++p) {
      const long i = lo + static_cast<long>(p * static_cast<std::size_t>(P) / (probes - 1));
      double s = 0.0;
      for (long k = -4; k <= 4; ++k) {
        const long j = i + k * P;
        if (j >= 0 && j < static_cast<long>(g.count)) s += std::norm(spec.values()[static_cast<std::size_t>(j)]);
      }
      stored_dev = std::max(stored_dev, std::abs(s - 1.0));
    }
  }
  double closed_dev = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    const double xi = -pi + two_pi * static_cast<double>(p) / static_cast<double>(probes - 1);
    double s = 0.0;
    for (int k = -4; k <= 4; ++k) {
      const double z = xi + two_pi * k;
      const double mod = which == Atom::wavelet ? ws.bell(z) : scaling_modulus(ws.bell, z);
      s += mod * mod;
    }
    closed_dev = std::max(closed_dev, std::abs(s - 1.0));
  }
  c.measured = std::max(stored_dev, closed_dev);
  c.passed = stored_ran && c.measured < c.tolerance;
  c.detail = std::string(which == Atom::wavelet ? "psi" : "phi") + " lattice sums at " + std::to_string(probes) +
             " probes in [-pi, pi]; stored grid max deviation " + sci(stored_dev) +
             (stored_ran ? "" : " (not run: 2pi is not a whole number of grid steps)") +
             ", closed form max deviation " + sci(closed_dev);
  return c;
}

/// Gram matrix of wavelet atoms by physical trapezoid quadrature.
inline std::vector<std::vector<cplx>> gram_matrix(const WaveletSystem& ws, std::span<const DyadicAtom> atoms,
                                                  const Grid1D& grid) {
  const auto samples = sample_atoms(ws.psi_hat, ws.options.atom_cutoff, grid, atoms);
  std::vector<SampledFunction> fs;
  fs.reserve(samples.size());
  for (const auto& s : samples) fs.emplace_back(grid, s);
  std::vector<std::vector<cplx>> G(atoms.size(), std::vector<cplx>(atoms.size()));
  parallel_for(atoms.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < atoms.size(); ++j) G[i][j] = inner_product(fs[i], fs[j]);
  });
  return G;
}

inline double gram_deviation(const std::vector<std::vector<cplx>>& G) {
  double dev = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i)
    for (std::size_t j = 0; j < G.size(); ++j) dev = std::max(dev, std::abs(G[i][j] - (i == j ? 1.0 : 0.0)));
  return dev;
}

inline std::vector<DyadicAtom> atom_block(int m_max, long n_max) {
  std::vector<DyadicAtom> atoms;
  for (int m = -m_max; m <= m_max; ++m)
    for (long n = -n_max; n <= n_max; ++n) atoms.push_back({m, n});
  return atoms;
}

inline Certificate two_scale_cross(const WaveletSystem& ws) {
  Certificate c;
  c.tolerance = 1e-7;
  const auto atoms = atom_block(1, 3);
  const auto grid = Grid1D::span(-80.0, 80.0, 1.0 / 32.0);
  c.measured = gram_deviation(gram_matrix(ws, atoms, grid));
  c.passed = c.measured < c.tolerance;
  c.detail = "21x21 Gram matrix, m in {-1,0,1}, n in -3..3, trapezoid on [-80, 80] with spacing 1/32";
  return c;
}

/// Gaussian-regularized moments int x^k psi(x) exp(-x^2/(2 sigma^2)) dx. Since
/// psi^ vanishes on |xi| < 2pi/3 they differ from the plain moments by
/// O(exp(-sigma^2 (2pi/3)^2 / 2)); plain truncated moments are dominated by
/// the slow tail and phase rounding.
inline std::vector<double> regularized_moments(const SpectrumOnBand& spec, int max_k, double sigma = 5.0) {
  const auto grid = Grid1D::span(-12.0 * sigma, 12.0 * sigma, 1.0 / 16.0);
  const auto vals = synthesize_lattice(spec, grid.origin, grid.spacing, grid.count);
  std::vector<double> out(static_cast<std::size_t>(max_k) + 1);
  for (int k = 0; k <= max_k; ++k) {
    std::vector<cplx> integrand(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double x = grid.point(i);
      integrand[i] = std::pow(x, k) * std::exp(-x * x / (2.0 * sigma * sigma)) * vals[i];
    }
    out[static_cast<std::size_t>(k)] = std::abs(integrate(SampledFunction(grid, std::move(integrand))));
  }
  return out;
}

inline Certificate moments(const WaveletSystem& ws, int max_k = 10) {
  Certificate c;
  c.tolerance = 1e-7;
  const auto mom = regularized_moments(ws.psi_hat, max_k);
  double worst = 0.0;
  for (int k = 0; k <= max_k; ++k) {
    const double scale = std::exp(ws.rho2 * std::lgamma(k + 1.0));
    worst = std::max(worst, mom[static_cast<std::size_t>(k)] / scale);
  }
  // d^k psi^(0) = 0 for all k iff psi^ vanishes on a neighbourhood of 0.
  const Grid1D& g = ws.psi_hat.grid();
  std::size_t nonzero_near_origin = 0;
  for (std::size_t i = 0; i < g.count; ++i)
    if (std::abs(g.point(i)) < 0.5 * bell_inner_edge && ws.psi_hat.values()[i] != cplx{}) ++nonzero_near_origin;
  c.measured = worst;
  c.passed = worst < c.tolerance && nonzero_near_origin == 0;
  c.detail = "max_k |int x^k psi e^{-x^2/50}| / k!^rho2 for k = 0.." + std::to_string(max_k) +
             "; stored psi^ nonzero samples within |xi| < pi/3: " + std::to_string(nonzero_near_origin);
  return c;
}

inline Certificate realness(const WaveletSystem& ws) {
  Certificate c;
  c.tolerance = 1e-10;
  for (const auto* f : {&ws.psi_samples, &ws.phi_samples})
    for (const auto& z : f->values()) c.measured = std::max(c.measured, std::abs(z.imag()));
  c.passed = c.measured < c.tolerance;
  c.detail = "max |Im| over psi and phi samples on the physical window";
  return c;
}

inline Certificate scaling_lowpass(const WaveletSystem& ws, std::size_t probes = 64) {
  Certificate c;
  c.tolerance = 1e-8;
  const Grid1D& g = ws.phi_hat.grid();
  const auto i0 = static_cast<std::size_t>(std::llround(-g.origin / g.spacing));
  const double at_zero = std::abs(std::abs(ws.phi_hat.values()[i0]) - 1.0);
  const auto radius = static_cast<long>(std::floor(ws.options.atom_cutoff));
  double worst = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    const double x = static_cast<double>(p) / static_cast<double>(probes);
    const auto vals = synthesize_lattice(ws.phi_hat, x - static_cast<double>(radius), 1.0,
                                         static_cast<std::size_t>(2 * radius + 1));
    const cplx s = pairwise_sum<cplx>(vals);
    worst = std::max(worst, std::abs(s - 1.0));
  }
  c.measured = std::max(at_zero, worst);
  c.passed = c.measured < c.tolerance;
  c.detail = "| |phi^(0)| - 1 | = " + sci(at_zero) + "; partition of unity over |n| <= " +
             std::to_string(radius) + " at " + std::to_string(probes) + " probes";
  return c;
}

/// Measured L2 norm of psi, spectral (Plancherel) and physical; recorded, not rescaled.
inline Certificate l2_norm(const WaveletSystem& ws) {
  Certificate c;
  c.tolerance = 1e-8;
  std::vector<double> sq(ws.psi_hat.grid().count);
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = ws.psi_hat.weight(i) * std::norm(ws.psi_hat.values()[i]);
  const double spectral = pairwise_sum<double>(sq) * ws.psi_hat.grid().spacing / two_pi;
  c.measured = std::sqrt(spectral);
  c.passed = std::abs(c.measured - 1.0) < c.tolerance;
  c.detail = "||psi||_2 via (1/2pi) int |psi^|^2; physical window value " +
             sci(l2_norm(ws.psi_samples));
  return c;
}

inline Certificate gevrey(const WaveletSystem& ws) {
  const auto g = certify_gevrey(ws.bump(), 10);
  Certificate c;
  c.tolerance = 10.0;
  c.measured = g.tail_spread;
  c.passed = g.passed;
  c.detail = std::string(GevreyCertificate::method) + "; h estimate " + sci(g.h_estimate);
  return c;
}

}  // namespace certify

inline void run_certificates(WaveletSystem& ws) {
  auto& c = ws.certificates;
  c["SUPPORT"] = certify::support(ws);
  c["SHIFT-ORTHONORMALITY-PSI"] = certify::shift_orthonormality(ws, Atom::wavelet);
  c["SHIFT-ORTHONORMALITY-PHI"] = certify::shift_orthonormality(ws, Atom::scaling);
  c["TWO-SCALE-CROSS"] = certify::two_scale_cross(ws);
  c["MOMENTS"] = certify::moments(ws);
  c["REALNESS"] = certify::realness(ws);
  c["SCALING-LOWPASS"] = certify::scaling_lowpass(ws);
  c["L2-NORM"] = certify::l2_norm(ws);
  c["GEVREY"] = certify::gevrey(ws);
}

/// Assembles a system from its parameters and (possibly externally supplied) spectra.
inline WaveletSystem assemble_system(double a, double rho2, const BuildOptions& options, SpectrumOnBand psi_hat,
                                     SpectrumOnBand phi_hat) {
  WaveletSystem ws;
  ws.a = a;
  ws.rho2 = rho2;
  ws.options = options;
  ws.bell = build_bell(build_bump(a, rho2));
  ws.psi_hat = std::move(psi_hat);
  ws.phi_hat = std::move(phi_hat);
  const Grid1D grid = physical_grid(options);
  ws.psi_samples = synthesize(ws.psi_hat, grid);
  ws.phi_samples = synthesize(ws.phi_hat, grid);
  if (options.run_certificates) run_certificates(ws);
  return ws;
}

/// Builds bump, bell, spectra and samples; certificate failures are recorded, not thrown.
inline WaveletSystem build_wavelet_system(double a, double rho2, const BuildOptions& options = {}) {
  const auto bell = build_bell(build_bump(a, rho2));
  if (!(options.window_half_width > 0.0) || !(options.sample_spacing > 0.0) || !(options.atom_cutoff > 0.0))
    throw PreconditionError("physical window, spacing and cutoff must be positive");
  const Grid1D sg = spectral_grid(options.points_per_period);
  return assemble_system(a, rho2, options, make_psi_hat(bell, sg), make_phi_hat(bell, sg));
}

}  // namespace subexp
