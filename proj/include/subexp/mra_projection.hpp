#pragma once

// Multiresolution projection kernels q_m(x, y) = 2^{md} q_0(2^m x, 2^m y) with
// q_0(x, y) = sum_k phi(x - k) phi(y - k), projections, kernel certificates,
// convergence experiments and the iterated-primitive decomposition.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dh_construction.hpp"
#include "gs_metrics.hpp"
#include "numerics.hpp"

namespace subexp {

struct ProjectionKernel {
  const WaveletSystem* ws = nullptr;  // not owned; must outlive the kernel
  int level = 0;
  long truncation_radius = 0;
  int dimension = 1;
  double tail_bound = 0.0;  // bound on the dropped lattice-sum tail
  DecayFit phi_envelope;    // fitted decay of |phi| used for the bound
};

namespace detail {

/// Envelope fit of |phi| on [10, 400] with exponent 1/rho2.
inline DecayFit phi_envelope_fit(const WaveletSystem& ws) {
  const double step = 0.125;
  const double lo = 10.0, hi = std::min(400.0, ws.options.atom_cutoff);
  const auto count = static_cast<std::size_t>((hi - lo) / step) + 1;
  const auto vals = synthesize_lattice(ws.phi_hat, lo, step, count);
  std::vector<DecaySample> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = {lo + static_cast<double>(i) * step, std::abs(vals[i])};
  return subexp_decay_fit(s, ExponentMode::fixed(1.0 / ws.rho2));
}

/// 2 sup|phi| sum_{j > K} C e^{-c j^p}.
inline double lattice_tail_bound(const DecayFit& env, double phi_sup, long K) {
  double s = 0.0;
  for (long j = K + 1;; ++j) {
    const double term = env.amplitude_C * std::exp(-env.rate_c * std::pow(static_cast<double>(j), env.exponent));
    s += term;
    if (term < 1e-30 || j > K + 1000000) break;
  }
  return 2.0 * phi_sup * s;
}

}  // namespace detail

inline constexpr double kernel_tail_target = 1e-12;

/// Kernel at the given level; K defaults to the smallest radius whose fitted
/// tail bound is below 1e-12 (capped so every term stays inside the atom cutoff).
inline ProjectionKernel make_projection_kernel(const WaveletSystem& ws, int level, int dimension = 1,
                                               std::optional<long> K = std::nullopt) {
  if (dimension < 1 || dimension > 2) throw PreconditionError("projection kernels support d = 1, 2");
  ProjectionKernel pk;
  pk.ws = &ws;
  pk.level = level;
  pk.dimension = dimension;
  pk.phi_envelope = detail::phi_envelope_fit(ws);
  if (!(pk.phi_envelope.rate_c > 0.0)) throw NumericalError("scaling function envelope does not decay");
  const double phi_sup = ws.phi_samples.sup_norm();
  const long cap = static_cast<long>(ws.options.atom_cutoff) - 16;
  if (K) {
    if (*K < 1 || *K > cap) throw PreconditionError("truncation radius outside 1..atom cutoff");
    pk.truncation_radius = *K;
  } else {
    long k = 8;
    while (k < cap && detail::lattice_tail_bound(pk.phi_envelope, phi_sup, k) >= kernel_tail_target) k += 8;
    pk.truncation_radius = std::min(k, cap);
  }
  pk.tail_bound = detail::lattice_tail_bound(pk.phi_envelope, phi_sup, pk.truncation_radius);
  return pk;
}

namespace detail {

/// 1-D level-0 kernel at scaled points.
inline double q0(const ProjectionKernel& pk, double x, double y) {
  const WaveletSystem& ws = *pk.ws;
  const long K = pk.truncation_radius;
  if (!std::isfinite(x) || !std::isfinite(y) ||
      0.5 * std::abs(x - y) + static_cast<double>(K) + 1.0 > ws.options.atom_cutoff)
    throw PreconditionError("kernel window: points too far apart for the truncation radius and atom cutoff");
  const double c = std::round(0.5 * (x + y));
  const auto n = static_cast<std::size_t>(2 * K + 1);
  // phi(x - k) for k = c - K .. c + K, ascending k
  const auto px = synthesize_lattice(ws.phi_hat, x - c + static_cast<double>(K), -1.0, n);
  const auto py = synthesize_lattice(ws.phi_hat, y - c + static_cast<double>(K), -1.0, n);
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = px[i].real() * py[i].real();
  return pairwise_sum<double>(terms);
}

}  // namespace detail

/// q_m(x, y); x and y have pk.dimension coordinates.
inline double kernel_eval(const ProjectionKernel& pk, std::span<const double> x, std::span<const double> y) {
  if (!pk.ws) throw PreconditionError("projection kernel has no wavelet system");
  if (x.size() != static_cast<std::size_t>(pk.dimension) || y.size() != x.size())
    throw PreconditionError("kernel point dimension mismatch");
  const double s = std::ldexp(1.0, pk.level);
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) v *= s * detail::q0(pk, s * x[i], s * y[i]);
  return v;
}

inline double kernel_eval(const ProjectionKernel& pk, double x, double y) {
  const double a[1] = {x}, b[1] = {y};
  return kernel_eval(pk, a, b);
}

// ---------------------------------------------------------------------------
// Projection

struct ProjectionResult {
  SampledFunction projected;
  double boundary_mass = 0.0;     // max |f| on the outer 1% of the window
  bool boundary_warning = false;  // boundary mass above 1e-8
  double kernel_form_gap = 0.0;   // coefficient form vs kernel form at probes
  std::size_t kernel_probes = 0;
};

inline double boundary_mass(std::span<const cplx> v) {
  const std::size_t edge = std::max<std::size_t>(2, v.size() / 100);
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(edge, v.size()); ++i) {
    m = std::max(m, std::abs(v[i]));
    m = std::max(m, std::abs(v[v.size() - 1 - i]));
  }
  return m;
}

inline constexpr double boundary_warning_level = 1e-8;

/// (q_m f)(x) = sum_k <f, phi_{m,k}> phi_{m,k}(x), cross-checked against the
/// kernel form int f(y) q_m(x, y) dy at kernel_probes grid points.
inline ProjectionResult project(const ProjectionKernel& pk, const SampledFunction& f, std::size_t kernel_probes = 5) {
  if (!pk.ws) throw PreconditionError("projection kernel has no wavelet system");
  if (f.dimension() != 1 || pk.dimension != 1) throw PreconditionError("projection of samples supports d = 1");
  if (!f.all_finite()) throw PreconditionError("invalid samples");
  const WaveletSystem& ws = *pk.ws;
  const Grid1D& g = f.grid();
  const double s = std::ldexp(1.0, pk.level);
  if (g.extent() * s < 1.0) throw PreconditionError("window too small for level shifts");
  const long K = pk.truncation_radius;
  const long kmin = static_cast<long>(std::floor(s * g.origin)) - K;
  const long kmax = static_cast<long>(std::ceil(s * g.last())) + K;
  std::vector<DyadicAtom> atoms;
  for (long k = kmin; k <= kmax; ++k) atoms.push_back({pk.level, k});
  // Samples carry the 2^{m/2} factor of phi_{m,k}.
  const auto A = sample_atoms(ws.phi_hat, ws.options.atom_cutoff, g, atoms);
  const auto w = detail::trapezoid_weights(g);
  std::vector<cplx> coef(atoms.size());
  parallel_for(atoms.size(), [&](std::size_t i) { coef[i] = detail::weighted_dot(f.values(), A[i], w); });
  std::vector<cplx> out(g.count);
  parallel_for(g.count, [&](std::size_t j) {
    std::vector<cplx> terms(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) terms[i] = coef[i] * A[i][j];
    out[j] = pairwise_sum<cplx>(terms);
  });

  ProjectionResult r;
  r.boundary_mass = boundary_mass(f.values());
  r.boundary_warning = r.boundary_mass > boundary_warning_level;
  // Kernel form with per-pair truncation window round((x + y)/2) +- K.
  const std::size_t probes = std::min(kernel_probes, g.count);
  for (std::size_t p = 0; p < probes; ++p) {
    const std::size_t ix = probes == 1 ? g.count / 2 : (g.count - 1) / 4 + p * ((g.count - 1) / 2) / (probes - 1);
    std::vector<cplx> terms(g.count);
    for (std::size_t j = 0; j < g.count; ++j) {
      const double c = std::round(0.5 * s * (g.point(ix) + g.point(j)));
      const long lo = std::max(kmin, static_cast<long>(c) - K), hi = std::min(kmax, static_cast<long>(c) + K);
      cplx q{};
      for (long k = lo; k <= hi; ++k) {
        const auto i = static_cast<std::size_t>(k - kmin);
        q += A[i][ix] * std::conj(A[i][j]);
      }
      terms[j] = w[j] * f[j] * q;
    }
    const cplx kernel_value = pairwise_sum<cplx>(terms);
    r.kernel_form_gap = std::max(r.kernel_form_gap, std::abs(kernel_value - out[ix]));
  }
  r.kernel_probes = probes;
  r.projected = SampledFunction(g, std::move(out));
  return r;
}

// ---------------------------------------------------------------------------
// Kernel certificates

struct KernelDecayReport {
  DecayFit fit;              // exponent fixed at 1/rho2
  DecayFit exponential_fit;  // exponent fixed at 1
  std::vector<DecaySample> samples;  // (u, max_x |q_0(x, x + u)|)
  double diagonal_sup = 0.0;         // sup_x q_0(x, x) over the probes
};

/// Samples |q_0(x, x + u)| for u in [0, u_max] (step 1/16) at probe_count
/// offsets x in [0, 1), takes the max over x and fits the envelope.
inline KernelDecayReport kernel_decay_certificate(const ProjectionKernel& pk, std::size_t probe_count = 8,
                                                  double u_max = 20.0) {
  if (!pk.ws) throw PreconditionError("projection kernel has no wavelet system");
  if (probe_count == 0) throw PreconditionError("kernel decay needs probes");
  const WaveletSystem& ws = *pk.ws;
  const long K = pk.truncation_radius;
  if (0.5 * u_max + static_cast<double>(K) + 1.0 > ws.options.atom_cutoff)
    throw PreconditionError("kernel window: u_max too large for the truncation radius");
  constexpr long L = 16;
  const auto nu = static_cast<std::size_t>(std::llround(u_max * L)) + 1;
  const long span = K + static_cast<long>(std::ceil(u_max)) + 2;
  std::vector<double> env(nu, 0.0);
  KernelDecayReport rep;
  for (std::size_t p = 0; p < probe_count; ++p) {
    const double x = static_cast<double>(p) / static_cast<double>(probe_count);
    // phi on x + i/L for i in [-span L, span L]
    const auto count = static_cast<std::size_t>(2 * span * L + 1);
    const auto tab = synthesize_lattice(ws.phi_hat, x - static_cast<double>(span), 1.0 / L, count);
    auto at = [&](long k, long i_off) {  // phi(x - k + i_off / L)
      return tab[static_cast<std::size_t>((span - k) * L + i_off)].real();
    };
    for (std::size_t iu = 0; iu < nu; ++iu) {
      const double u = static_cast<double>(iu) / L;
      const auto c = static_cast<long>(std::round(x + 0.5 * u));
      std::vector<double> terms;
      terms.reserve(static_cast<std::size_t>(2 * K + 1));
      for (long k = c - K; k <= c + K; ++k) terms.push_back(at(k, 0) * at(k, static_cast<long>(iu)));
      const double q = pairwise_sum<double>(terms);
      env[iu] = std::max(env[iu], std::abs(q));
      if (iu == 0) rep.diagonal_sup = std::max(rep.diagonal_sup, q);
    }
  }
  for (std::size_t iu = 0; iu < nu; ++iu) rep.samples.push_back({static_cast<double>(iu) / L, env[iu]});
  rep.fit = subexp_decay_fit(rep.samples, ExponentMode::fixed(1.0 / ws.rho2));
  rep.exponential_fit = subexp_decay_fit(rep.samples, ExponentMode::fixed(1.0));
  return rep;
}

struct PolynomialReproductionReport {
  std::vector<double> max_deviation;  // per degree 0..max_degree
  std::size_t probes = 0;
  double regularization_sigma = 0.0;
};

/// Checks int q_0(x, y)(y - x)^j dy = delta_{j0} at 32 probes x = -1/2 + i/32.
/// The moments are taken against exp(-(y - x)^2 / (2 sigma^2)); because the
/// spectrum of q_0(x, .) equals e^{-ix xi} on |xi| < 2pi/3, the weighted and
/// plain moments agree up to exp(-sigma^2 (2pi/3)^2 / 2).
inline PolynomialReproductionReport polynomial_reproduction(const ProjectionKernel& pk, int max_degree,
                                                            double sigma = 5.0) {
  if (!pk.ws) throw PreconditionError("projection kernel has no wavelet system");
  if (max_degree < 0 || max_degree > 6) throw PreconditionError("polynomial reproduction degree must lie in 0..6");
  const WaveletSystem& ws = *pk.ws;
  const long K = pk.truncation_radius;
  constexpr long L = 32;
  constexpr std::size_t probes = 32;
  const long reach = static_cast<long>(std::ceil(10.0 * sigma));
  if (0.5 * static_cast<double>(reach) + static_cast<double>(K) + 2.0 > ws.options.atom_cutoff)
    throw PreconditionError("kernel window: regularization too wide for the truncation radius");
  const long span = K + reach + 3;
  const auto count = static_cast<std::size_t>(2 * span * L + 1);
  const double t0 = -0.5 - static_cast<double>(span);
  const auto tab = synthesize_lattice(ws.phi_hat, t0, 1.0 / L, count);
  auto phi_at = [&](long idx) { return tab[static_cast<std::size_t>(idx)].real(); };
  PolynomialReproductionReport rep;
  rep.max_deviation.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);
  rep.probes = probes;
  rep.regularization_sigma = sigma;
  const long ny = 2 * reach * L + 1;
  for (std::size_t p = 0; p < probes; ++p) {
    const long ix = static_cast<long>(p);  // x = -1/2 + ix/L
    const double x = -0.5 + static_cast<double>(ix) / L;
    std::vector<std::vector<double>> terms(rep.max_deviation.size(), std::vector<double>(static_cast<std::size_t>(ny)));
    for (long j = 0; j < ny; ++j) {
      const long iy = ix - reach * L + j;
      const double y = -0.5 + static_cast<double>(iy) / L;
      const auto c = static_cast<long>(std::round(0.5 * (x + y)));
      double q = 0.0;
      for (long k = c - K; k <= c + K; ++k) {
        // table index of t = x - k is (x - k - t0) L = ix + (span - k) L
        q += phi_at(ix + (span - k) * L) * phi_at(iy + (span - k) * L);
      }
      const double u = y - x;
      const double wgt = ((j == 0 || j == ny - 1) ? 0.5 : 1.0) / L * std::exp(-u * u / (2.0 * sigma * sigma)) * q;
      double pw = 1.0;
      for (auto& col : terms) {
        col[static_cast<std::size_t>(j)] = wgt * pw;
        pw *= u;
      }
    }
    for (std::size_t d = 0; d < terms.size(); ++d) {
      const double v = pairwise_sum<double>(terms[d]) - (d == 0 ? 1.0 : 0.0);
      rep.max_deviation[d] = std::max(rep.max_deviation[d], std::abs(v));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Convergence experiment

/// Function under projection: samples plus, when known, its closed-form spectrum.
struct ConvergenceInput {
  SampledFunction samples;
  std::function<cplx(double)> spectrum;  // may be empty: then taken from the samples
  double spectral_half_width = 60.0;
};

struct ConvergenceRow {
  int m = 0;
  double sup_error = 0.0;         // sup |q_m f - f| from the exact error spectrum
  double seminorm = 0.0;          // seminorm estimate of q_m f
  double boundary_mass = 0.0;     // of q_m f on the sample window
  double quadrature_error = 0.0;  // sup |q_m f - f| by physical-side projection
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool sup_error_monotone = false;  // nonincreasing in m
};

namespace detail {

/// Error spectrum of q_m f - f. The phases of phi^(eta) and phi^(eta + 2 pi l)
/// cancel, so only moduli enter and the error is exactly 0 where |phi^| = 1.
inline cplx projection_error_spectrum(const BellFunction& bell, const std::function<cplx(double)>& fhat, int m,
                                      double xi) {
  const double eta = std::ldexp(xi, -m);
  const double p = scaling_modulus(bell, eta);
  cplx e = fhat(xi) * (p * p - 1.0);
  if (p == 0.0) return e;
  for (int l = -1; l <= 1; l += 2) {
    const double q = scaling_modulus(bell, eta + two_pi * l);
    if (q != 0.0) e += p * q * fhat(xi + std::ldexp(two_pi, m) * l);
  }
  return e;
}

/// Spectra of q_m f and of q_m f - f on a grid fine enough to synthesize
/// without wrap-around for |x| <= reach.
inline std::pair<SpectrumOnBand, SpectrumOnBand> projection_bands(const BellFunction& bell,
                                                                  const std::function<cplx(double)>& fhat,
                                                                  double half_width, int m, double reach) {
  const double band = std::max(half_width, std::ldexp(scaling_edge, m));
  const double dxi = std::min(0.01, pi / (4.0 * reach + 1.0));
  const auto cells = static_cast<std::size_t>(std::ceil(2.0 * band / dxi));
  const Grid1D sg(-band, 2.0 * band / static_cast<double>(cells), cells + 1);
  std::vector<cplx> qv(sg.count), ev(sg.count);
  for (std::size_t i = 1; i + 1 < sg.count; ++i) {  // band ends stay exactly zero
    const double xi = sg.point(i);
    ev[i] = projection_error_spectrum(bell, fhat, m, xi);
    qv[i] = fhat(xi) + ev[i];
  }
  return {SpectrumOnBand(sg, std::move(qv), {{-band, band}}), SpectrumOnBand(sg, std::move(ev), {{-band, band}})};
}

}  // namespace detail

/// For m = 0..max_level: sup|q_m f - f| (exact error spectrum, synthesized on
/// the sample grid), the seminorm of q_m f, the boundary mass and a physical
/// projection cross-check.
inline ConvergenceTable mra_convergence_experiment(const WaveletSystem& ws, const ConvergenceInput& in, int max_level,
                                                   const SeminormParams& params, std::span<const double> seminorm_probes,
                                                   bool quadrature_check = true) {
  const SampledFunction& f = in.samples;
  if (f.dimension() != 1) throw PreconditionError("convergence experiment supports d = 1");
  if (max_level < 0 || max_level > 12) throw PreconditionError("convergence levels must lie in 0..12");
  const double scale_f = std::max(1.0, f.sup_norm());
  if (boundary_mass(f.values()) > 1e-12 * scale_f)
    throw PreconditionError("input must decay below 1e-12 at the window edges");
  std::function<cplx(double)> fhat = in.spectrum;
  if (!fhat) {
    const SampledFunction copy = f;
    fhat = [copy](double xi) {
      const double pt[1] = {xi};
      return forward_transform(copy, pt)[0];
    };
  }
  const Grid1D& g = f.grid();
  ConvergenceTable table;
  table.rows.resize(static_cast<std::size_t>(max_level) + 1);
  for (int m = 0; m <= max_level; ++m) {
    ConvergenceRow& row = table.rows[static_cast<std::size_t>(m)];
    row.m = m;
    const double reach = std::max(std::abs(g.origin), std::abs(g.last()));
    const auto [qs, es] = detail::projection_bands(ws.bell, fhat, in.spectral_half_width, m, reach);
    const auto err = synthesize_lattice(es, g.origin, g.spacing, g.count);
    for (const auto& z : err) row.sup_error = std::max(row.sup_error, std::abs(z));
    row.seminorm = seminorm_estimate(qs, params, seminorm_probes).value;
    const auto qf = synthesize_lattice(qs, g.origin, g.spacing, g.count);
    row.boundary_mass = boundary_mass(qf);
    if (quadrature_check) {
      const auto pk = make_projection_kernel(ws, m);
      const auto pr = project(pk, f, 0);
      for (std::size_t j = 0; j < g.count; ++j)
        row.quadrature_error = std::max(row.quadrature_error, std::abs(pr.projected[j] - f[j]));
    }
  }
  table.sup_error_monotone = true;
  for (std::size_t i = 1; i < table.rows.size(); ++i)
    if (table.rows[i].sup_error > table.rows[i - 1].sup_error) table.sup_error_monotone = false;
  return table;
}

/// Banded test function for the dual panel: closed-form spectrum and the
/// half-width beyond which it is negligible.
struct PanelFunction {
  std::string name;
  std::function<cplx(double)> spectrum;
  double spectral_half_width = 60.0;
};

struct DualConvergenceRow {
  int m = 0;
  std::vector<double> errors;  // |<q_m mu, g> - <mu, g>| per panel function
};

/// Pairing of the projected functional q_m mu with test functions g, for a
/// point-mass functional mu. Since q_m is real and symmetric,
/// <q_m mu, g> = <mu, q_m g>, which is evaluated through the error spectrum.
inline std::vector<DualConvergenceRow> dual_convergence_panel(const WaveletSystem& ws, const PointMasses& mu,
                                                              std::span<const PanelFunction> panel, int max_level) {
  mu.validate();
  if (panel.empty()) throw PreconditionError("dual panel needs test functions");
  if (max_level < 0 || max_level > 12) throw PreconditionError("convergence levels must lie in 0..12");
  double reach = 1.0;
  for (double x : mu.points) reach = std::max(reach, std::abs(x));
  std::vector<DualConvergenceRow> rows;
  for (int m = 0; m <= max_level; ++m) {
    DualConvergenceRow row;
    row.m = m;
    for (const auto& g : panel) {
      const auto bands = detail::projection_bands(ws.bell, g.spectrum, g.spectral_half_width, m, reach);
      const auto vals = spectral_derivative(bands.second, mu.derivative_order, mu.points);
      const double sign = mu.derivative_order % 2 ? -1.0 : 1.0;
      cplx s{};
      for (std::size_t i = 0; i < vals.size(); ++i) s += mu.weights[i] * sign * vals[i];
      row.errors.push_back(std::abs(s));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Iterated primitives

struct PrimitiveDecomposition {
  int r = 0;
  SampledFunction g;
  SampledFunction g_r;
  // |g_r(y)| <= C r!^{rho-1} h^r e^{-(c/2)|y|^{1/rho}}, fitted with h fixed at 1
  double C = 0.0;
  double h = 1.0;
  double c = 0.0;
  double max_moment_residual = 0.0;  // relative
  double derivative_mismatch = 0.0;  // relative sup of d^r g_r - g on the interior
  cplx integral;                     // int g_r
};

namespace detail {

/// Weights integrating the 6-point Lagrange interpolant over the cell [0, 1]
/// for nodes at integer offsets o, o+1, ..., o+5 (o in -5..0).
inline std::array<double, 6> lagrange_cell_weights(int o) {
  std::array<double, 6> w{};
  for (int k = 0; k < 6; ++k) {
    w[static_cast<std::size_t>(k)] = gauss_legendre(
        [&](double s) {
          double L = 1.0;
          for (int j = 0; j < 6; ++j)
            if (j != k) L *= (s - (o + j)) / static_cast<double>(k - j);
          return L;
        },
        0.0, 1.0);
  }
  return w;
}

/// Cell integrals int_{y_i}^{y_{i+1}} v for i = 0..n-2.
inline std::vector<cplx> cell_integrals(std::span<const cplx> v, double h) {
  const std::size_t n = v.size();
  if (n < 6) throw PreconditionError("primitive decomposition needs at least six samples");
  std::array<std::array<double, 6>, 6> W;
  for (int o = -5; o <= 0; ++o) W[static_cast<std::size_t>(o + 5)] = lagrange_cell_weights(o);
  std::vector<cplx> out(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // prefer the centered stencil i-2..i+3, shifted inside the grid
    long start = static_cast<long>(i) - 2;
    start = std::clamp(start, 0L, static_cast<long>(n) - 6);
    const int o = static_cast<int>(start - static_cast<long>(i));
    const auto& w = W[static_cast<std::size_t>(o + 5)];
    cplx s{};
    for (int k = 0; k < 6; ++k) s += w[static_cast<std::size_t>(k)] * v[static_cast<std::size_t>(start + k)];
    out[i] = s * h;
  }
  return out;
}

/// int_{y_0}^{y_i} v
inline std::vector<cplx> left_primitive(std::span<const cplx> v, double h) {
  const auto c = cell_integrals(v, h);
  std::vector<cplx> out(v.size());
  for (std::size_t i = 1; i < v.size(); ++i) out[i] = out[i - 1] + c[i - 1];
  return out;
}

/// -int_{y_i}^{y_last} v
inline std::vector<cplx> right_primitive(std::span<const cplx> v, double h) {
  const auto c = cell_integrals(v, h);
  std::vector<cplx> out(v.size());
  for (std::size_t i = v.size() - 1; i-- > 0;) out[i] = out[i + 1] - c[i];
  return out;
}

/// Eighth-order central first derivative; the 4 points at each end are left 0.
inline std::vector<cplx> derivative8(std::span<const cplx> v, double h) {
  static constexpr double c[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  std::vector<cplx> out(v.size());
  for (std::size_t i = 4; i + 4 < v.size(); ++i) {
    cplx s{};
    for (std::size_t k = 1; k <= 4; ++k) s += c[k - 1] * (v[i + k] - v[i - k]);
    out[i] = s / h;
  }
  return out;
}

}  // namespace detail

/// g_r with d^r g_r = g: left-tail iterated primitive for y < 0, right-tail form
/// for y >= 0. Requires the moments of g through order r to vanish.
inline PrimitiveDecomposition primitive_decomposition_1d(const SampledFunction& g, int r, double rho = 2.0) {
  if (g.dimension() != 1) throw PreconditionError("primitive decomposition supports d = 1");
  if (r < 1 || r > 12) throw PreconditionError("primitive order must lie in 1..12");
  if (!g.all_finite()) throw PreconditionError("invalid samples");
  const Grid1D& grid = g.grid();
  const double gmax = g.sup_norm();
  PrimitiveDecomposition pd;
  pd.r = r;
  pd.g = g;
  if (gmax > 0.0 && boundary_mass(g.values()) > 1e-10 * gmax)
    throw PreconditionError("decay precondition: samples do not vanish at the window edges");
  for (int j = 0; j <= r; ++j) {
    std::vector<cplx> mj(grid.count), aj(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double yj = std::pow(grid.point(i), j);
      mj[i] = yj * g[i];
      aj[i] = std::abs(mj[i]);
    }
    const double mom = std::abs(integrate(SampledFunction(grid, std::move(mj))));
    const double ref = std::abs(integrate(SampledFunction(grid, std::move(aj))));
    const double rel = ref > 0.0 ? mom / ref : 0.0;
    pd.max_moment_residual = std::max(pd.max_moment_residual, rel);
    if (rel > 1e-8) throw PreconditionError("moment precondition: moment " + std::to_string(j) + " does not vanish");
  }
  std::vector<cplx> left(g.values().begin(), g.values().end()), right = left;
  for (int k = 0; k < r; ++k) {
    left = detail::left_primitive(left, grid.spacing);
    right = detail::right_primitive(right, grid.spacing);
  }
  std::vector<cplx> gr(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) gr[i] = grid.point(i) < 0.0 ? left[i] : right[i];
  pd.g_r = SampledFunction(grid, gr);
  pd.integral = integrate(pd.g_r);

  std::vector<cplx> d = gr;
  for (int k = 0; k < r; ++k) d = detail::derivative8(d, grid.spacing);
  const std::size_t skip = 4 * static_cast<std::size_t>(r) + 1;
  double mismatch = 0.0;
  for (std::size_t i = skip; i + skip < grid.count; ++i) mismatch = std::max(mismatch, std::abs(d[i] - g[i]));
  pd.derivative_mismatch = gmax > 0.0 ? mismatch / gmax : mismatch;
  if (pd.derivative_mismatch > 1e-5) throw NumericalError("decomposition failed: d^r g_r differs from g");

  // Envelope of |g_r| against |y|.
  std::vector<DecaySample> s(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) s[i] = {std::abs(grid.point(i)), std::abs(gr[i])};
  std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
  try {
    const auto fit = subexp_decay_fit(s, ExponentMode::fixed(1.0 / rho));
    pd.C = fit.amplitude_C / std::exp((rho - 1.0) * std::lgamma(r + 1.0));
    pd.c = 2.0 * fit.rate_c;
  } catch (const PreconditionError&) {
    // too few envelope points (e.g. g = 0): constants stay 0
  }
  return pd;
}

}  // namespace subexp
