#pragma once

// Tensor-product wavelet atoms, the continuous wavelet transform, coefficient
// analysis (two independent routes in 1-D), partial-sum synthesis and the
// Parseval pairing.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "dh_construction.hpp"
#include "numerics.hpp"

namespace subexp {

/// conj(g^(-xi)) on the same symmetric grid: the spectrum of conj(g).
inline SpectrumOnBand conjugate_spectrum(const SpectrumOnBand& spec) {
  const Grid1D& g = spec.grid();
  if (std::abs(g.origin + g.last()) > 1e-9 * std::max(1.0, std::abs(g.origin)))
    throw PreconditionError("conjugate spectrum needs a symmetric band");
  std::vector<cplx> v(g.count);
  for (std::size_t i = 0; i < g.count; ++i) v[i] = std::conj(spec.values()[g.count - 1 - i]);
  std::vector<Interval> sup;
  for (const auto& iv : spec.support()) sup.push_back({-iv.hi, -iv.lo});
  return SpectrumOnBand(g, std::move(v), std::move(sup));
}

// ---------------------------------------------------------------------------
// Atoms

/// 2^{md/2} prod_i psi_{eps_i}(2^m x_i - n_i) with psi_0 = phi, psi_1 = psi.
inline double tensor_atom(const WaveletSystem& ws, const WaveletIndex& l, std::span<const double> x) {
  if (x.size() != l.dimension()) throw PreconditionError("atom point dimension mismatch");
  const double scale = std::ldexp(1.0, l.m);
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = scale * x[i] - static_cast<double>(l.n[i]);
    if (!(std::abs(t) <= ws.options.atom_cutoff)) throw PreconditionError("atom argument exceeds evaluation window");
    const double pt[1] = {t};
    const auto& spec = l.wavelet_along(i) ? ws.psi_hat : ws.phi_hat;
    v *= std::sqrt(scale) * synthesize(spec, pt)[0].real();
  }
  return v;
}

// ---------------------------------------------------------------------------
// Continuous wavelet transform

/// (1/a^d) int f(x) conj(psi_eps((x - b)/a)) dx by trapezoid quadrature;
/// epsilon = all ones unless given (d = 2 only).
inline cplx cwt(const WaveletSystem& ws, const SampledFunction& f, std::span<const double> b, double a,
                unsigned epsilon = 0) {
  if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("wavelet transform scale must be positive");
  const std::size_t d = f.dimension();
  if (b.size() != d) throw PreconditionError("wavelet transform point dimension mismatch");
  if (d > 2) throw PreconditionError("wavelet transform supports d = 1, 2");
  if (!f.all_finite()) throw PreconditionError("invalid samples");
  if (epsilon == 0) epsilon = (1u << d) - 1u;
  std::vector<std::vector<cplx>> factors(d);
  for (std::size_t i = 0; i < d; ++i) {
    const Grid1D& g = f.axes()[i];
    if (b[i] < g.origin || b[i] > g.last()) throw PreconditionError("wavelet transform center outside the grid");
    const auto& spec = ((epsilon >> i) & 1u) ? ws.psi_hat : ws.phi_hat;
    factors[i] = sample_lattice(spec, ws.options.atom_cutoff, (g.origin - b[i]) / a, g.spacing / a, g.count);
    for (auto& z : factors[i]) z = std::conj(z) / a;
  }
  std::vector<cplx> prod(f.size());
  if (d == 1) {
    for (std::size_t j = 0; j < f.size(); ++j) prod[j] = f[j] * factors[0][j];
  } else {
    const std::size_t ny = f.axes()[1].count;
    for (std::size_t i = 0; i < f.axes()[0].count; ++i)
      for (std::size_t j = 0; j < ny; ++j) prod[i * ny + j] = f[i * ny + j] * factors[0][i] * factors[1][j];
  }
  return integrate(SampledFunction(f.axes(), std::move(prod)));
}

inline cplx cwt(const WaveletSystem& ws, const SampledFunction& f, double b, double a) {
  const double pt[1] = {b};
  return cwt(ws, f, pt, a);
}

/// W(b, a) and its b-derivatives from a closed-form spectrum:
/// (1/2pi) int f^(xi) (i xi)^beta conj(psi^(a xi)) e^{i b xi} dxi over the grid of f_hat.
inline cplx cwt_from_spectrum(const WaveletSystem& ws, const SpectrumOnBand& f_hat, double b, double a, int beta = 0) {
  if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("wavelet transform scale must be positive");
  if (beta < 0 || beta > max_derivative_order) throw PreconditionError("derivative order cap");
  const Grid1D& g = f_hat.grid();
  std::vector<cplx> terms;
  for (const auto& [first, last] : f_hat.ranges())
    for (std::size_t l = first; l <= last; ++l) {
      const cplx v = f_hat.values()[l];
      if (v == cplx{}) continue;
      const double xi = g.point(l);
      const double eta = a * xi;
      const double mod = ws.bell(eta);
      if (mod == 0.0) continue;
      const cplx psi = std::polar(mod, 0.5 * eta);
      terms.push_back(f_hat.weight(l) * v * std::pow(cplx(0.0, xi), beta) * std::conj(psi) * std::polar(1.0, b * xi));
    }
  return pairwise_sum<cplx>(terms) * (g.spacing / two_pi);
}

/// Forward trapezoid transform of 1-D samples on the lattice omega_k = w0 + k*dw.
inline std::vector<cplx> transform_lattice(const SampledFunction& f, double w0, double dw, std::size_t count,
                                           std::size_t decimation = 1) {
  if (f.dimension() != 1) throw PreconditionError("forward transform needs 1-D samples");
  const Grid1D& g = f.grid();
  // Treat the samples as a "spectrum" in x and synthesize at t = -omega.
  std::vector<cplx> v(f.values().begin(), f.values().end());
  const SpectrumOnBand as_band(g, std::move(v), {{g.origin, g.last()}});
  auto out = synthesize_lattice(as_band, -w0, -dw, count, decimation);
  for (auto& z : out) z *= two_pi;
  return out;
}

// ---------------------------------------------------------------------------
// Analysis

struct AnalyzeOptions {
  /// Use the conjugate wavelet family: c_lambda = int f psi_lambda.
  bool conjugate_family = false;
  /// Run the spectral wavelet-transform route as a cross-check (d = 1).
  bool cross_check = true;
  double consistency_tolerance = 1e-9;
};

struct AnalyzeReport {
  CoefficientSet coefficients;
  double max_route_gap = 0.0;  // direct vs wavelet-transform route
  bool cross_checked = false;
};

namespace detail {

inline std::vector<DyadicAtom> level_atoms(int m, long N) {
  std::vector<DyadicAtom> a;
  for (long n = -N; n <= N; ++n) a.push_back({m, n});
  return a;
}

inline std::vector<double> trapezoid_weights(const Grid1D& g) {
  std::vector<double> w(g.count, g.spacing);
  w.front() = w.back() = 0.5 * g.spacing;
  return w;
}

/// sum_j w_j f_j conj(a_j) with a fixed summation order.
inline cplx weighted_dot(std::span<const cplx> f, std::span<const cplx> a, std::span<const double> w) {
  std::vector<cplx> terms(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) terms[j] = w[j] * f[j] * std::conj(a[j]);
  return pairwise_sum<cplx>(terms);
}

/// Coefficients of level m via the wavelet-transform sampling identity
/// c = 2^{-m/2} W(n 2^{-m}, 2^{-m}), W evaluated spectrally from the samples.
inline std::vector<cplx> spectral_route_level(const SpectrumOnBand& analyzing, const SampledFunction& f, int m,
                                              long N, double cutoff) {
  const Grid1D& eg = analyzing.grid();
  const double scale = std::ldexp(1.0, m);
  const Grid1D& g = f.grid();
  double reach = 0.0;
  for (std::size_t j = 0; j < g.count; ++j)
    if (f[j] != cplx{}) reach = std::max(reach, std::abs(g.point(j)));
  // Alias period of the eta quadrature must exceed the largest |2^m x - n| plus the atom cutoff.
  const double period = two_pi / eg.spacing;
  const auto dec = static_cast<std::size_t>(
      std::max(1.0, std::floor(period / (static_cast<double>(N) + scale * reach + cutoff))));
  std::vector<cplx> out(static_cast<std::size_t>(2 * N + 1));
  std::vector<std::vector<cplx>> partial(out.size());
  for (const auto& [first, last] : analyzing.ranges()) {
    std::size_t l0 = first;
    while (l0 % dec != 0) ++l0;
    if (l0 > last) continue;
    const std::size_t count = (last - l0) / dec + 1;
    const auto F = transform_lattice(f, scale * eg.point(l0), scale * eg.spacing * static_cast<double>(dec), count);
    for (long n = -N; n <= N; ++n) {
      auto& terms = partial[static_cast<std::size_t>(n + N)];
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t l = l0 + k * dec;
        const double eta = eg.point(l);
        terms.push_back(analyzing.weight(l) * static_cast<double>(dec) * std::conj(analyzing.values()[l]) *
                        std::polar(1.0, static_cast<double>(n) * eta) * F[k]);
      }
    }
  }
  const double factor = std::sqrt(scale) * eg.spacing / two_pi;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = pairwise_sum<cplx>(partial[i]) * factor;
  return out;
}

}  // namespace detail

/// Every c_lambda = int f conj(psi_lambda) over the window. In 1-D the direct
/// quadrature is cross-checked against the wavelet-transform route.
inline AnalyzeReport analyze_report(const WaveletSystem& ws, const SampledFunction& f, const IndexWindow& window,
                                    const AnalyzeOptions& opt = {}) {
  if (static_cast<int>(f.dimension()) != window.d) throw PreconditionError("sample dimension does not match window");
  if (window.d > 2) throw PreconditionError("analysis supports d = 1, 2");
  if (!f.all_finite()) throw PreconditionError("invalid samples");
  const SpectrumOnBand psi = opt.conjugate_family ? conjugate_spectrum(ws.psi_hat) : ws.psi_hat;
  const SpectrumOnBand phi = opt.conjugate_family ? conjugate_spectrum(ws.phi_hat) : ws.phi_hat;
  const double cutoff = ws.options.atom_cutoff;
  AnalyzeReport rep;
  rep.coefficients = CoefficientSet::zeros(window, "analyze");
  auto& coeffs = rep.coefficients.coefficients;
  const long N = window.N;
  const std::size_t side = static_cast<std::size_t>(2 * N + 1);

  if (window.d == 1) {
    const Grid1D& g = f.grid();
    const auto w = detail::trapezoid_weights(g);
    for (int m = -window.M; m <= window.M; ++m) {
      const auto atoms = detail::level_atoms(m, N);
      const auto samples = sample_atoms(psi, cutoff, g, atoms);
      std::vector<cplx> direct(side);
      parallel_for(side, [&](std::size_t i) { direct[i] = detail::weighted_dot(f.values(), samples[i], w); });
      for (std::size_t i = 0; i < side; ++i)
        coeffs[WaveletIndex(1, m, {atoms[i].n})] = direct[i];
      if (opt.cross_check) {
        const auto spectral = detail::spectral_route_level(psi, f, m, N, cutoff);
        for (std::size_t i = 0; i < side; ++i) rep.max_route_gap = std::max(rep.max_route_gap, std::abs(direct[i] - spectral[i]));
        rep.cross_checked = true;
      }
    }
    if (rep.cross_checked && rep.max_route_gap > opt.consistency_tolerance)
      throw NumericalError("coefficient consistency: direct and wavelet-transform routes differ by " +
                           sci(rep.max_route_gap));
    return rep;
  }

  // d = 2: separable contraction, first along axis 1, then axis 0.
  const Grid1D& gx = f.axes()[0];
  const Grid1D& gy = f.axes()[1];
  const auto wx = detail::trapezoid_weights(gx);
  const auto wy = detail::trapezoid_weights(gy);
  const std::size_t nx = gx.count, ny = gy.count;
  for (int m = -window.M; m <= window.M; ++m) {
    const auto atoms = detail::level_atoms(m, N);
    const std::vector<std::vector<cplx>> ax[2] = {sample_atoms(phi, cutoff, gx, atoms), sample_atoms(psi, cutoff, gx, atoms)};
    const std::vector<std::vector<cplx>> ay[2] = {sample_atoms(phi, cutoff, gy, atoms), sample_atoms(psi, cutoff, gy, atoms)};
    for (unsigned ey = 0; ey < 2; ++ey) {
      // T[ny_index][i] = sum_j wy_j f(i, j) conj(ay_j)
      std::vector<std::vector<cplx>> T(side, std::vector<cplx>(nx));
      parallel_for(side, [&](std::size_t k) {
        const auto& a = ay[ey][k];
        for (std::size_t i = 0; i < nx; ++i) {
          cplx s{};
          const cplx* row = &f.values()[i * ny];
          for (std::size_t j = 0; j < ny; ++j) s += wy[j] * row[j] * std::conj(a[j]);
          T[k][i] = s;
        }
      });
      for (unsigned ex = 0; ex < 2; ++ex) {
        const unsigned eps = ex | (ey << 1);
        if (eps == 0) continue;
        for (std::size_t ky = 0; ky < side; ++ky)
          for (std::size_t kx = 0; kx < side; ++kx) {
            const cplx c = detail::weighted_dot(T[ky], ax[ex][kx], wx);
            coeffs[WaveletIndex(eps, m, {atoms[kx].n, atoms[ky].n})] = c;
          }
      }
    }
  }
  return rep;
}

inline CoefficientSet analyze(const WaveletSystem& ws, const SampledFunction& f, const IndexWindow& window,
                              const AnalyzeOptions& opt = {}) {
  return analyze_report(ws, f, window, opt).coefficients;
}

// ---------------------------------------------------------------------------
// Synthesis

/// sum over the window of c_lambda psi_lambda on the given axes (1 or 2 grids).
inline SampledFunction synthesize_partial(const WaveletSystem& ws, const CoefficientSet& coeffs,
                                          const std::vector<Grid1D>& axes) {
  if (static_cast<int>(axes.size()) != coeffs.window.d) throw PreconditionError("grid dimension does not match window");
  if (axes.size() > 2) throw PreconditionError("synthesis supports d = 1, 2");
  auto out = SampledFunction::zeros(axes);
  if (coeffs.coefficients.empty()) return out;
  const IndexWindow& window = coeffs.window;
  const long N = window.N;
  const std::size_t side = static_cast<std::size_t>(2 * N + 1);
  const double cutoff = ws.options.atom_cutoff;
  auto coef = [&](unsigned eps, int m, std::vector<long> n) {
    auto it = coeffs.coefficients.find(WaveletIndex(eps, m, std::move(n)));
    return it == coeffs.coefficients.end() ? cplx{} : it->second;
  };
  auto& vals = out.mutable_values();
  if (axes.size() == 1) {
    const Grid1D& g = axes[0];
    for (int m = -window.M; m <= window.M; ++m) {
      const auto atoms = detail::level_atoms(m, N);
      std::vector<cplx> c(side);
      bool any = false;
      for (std::size_t i = 0; i < side; ++i) {
        c[i] = coef(1, m, {atoms[i].n});
        any = any || c[i] != cplx{};
      }
      if (!any) continue;
      const auto samples = sample_atoms(ws.psi_hat, cutoff, g, atoms);
      parallel_for(g.count, [&](std::size_t j) {
        cplx s{};
        for (std::size_t i = 0; i < side; ++i) s += c[i] * samples[i][j];
        vals[j] += s;
      });
    }
    return out;
  }
  const Grid1D& gx = axes[0];
  const Grid1D& gy = axes[1];
  const std::size_t ny = gy.count;
  for (int m = -window.M; m <= window.M; ++m) {
    const auto atoms = detail::level_atoms(m, N);
    const std::vector<std::vector<cplx>> ax[2] = {sample_atoms(ws.phi_hat, cutoff, gx, atoms), sample_atoms(ws.psi_hat, cutoff, gx, atoms)};
    const std::vector<std::vector<cplx>> ay[2] = {sample_atoms(ws.phi_hat, cutoff, gy, atoms), sample_atoms(ws.psi_hat, cutoff, gy, atoms)};
    for (unsigned eps = 1; eps < 4; ++eps) {
      const unsigned ex = eps & 1u, ey = (eps >> 1) & 1u;
      for (std::size_t ky = 0; ky < side; ++ky) {
        // row profile along x for fixed shift along y
        std::vector<cplx> px(gx.count);
        bool any = false;
        for (std::size_t kx = 0; kx < side; ++kx) {
          const cplx c = coef(eps, m, {atoms[kx].n, atoms[ky].n});
          if (c == cplx{}) continue;
          any = true;
          for (std::size_t i = 0; i < gx.count; ++i) px[i] += c * ax[ex][kx][i];
        }
        if (!any) continue;
        const auto& a = ay[ey][ky];
        parallel_for(gx.count, [&](std::size_t i) {
          for (std::size_t j = 0; j < ny; ++j) vals[i * ny + j] += px[i] * a[j];
        });
      }
    }
  }
  return out;
}

inline SampledFunction synthesize_partial(const WaveletSystem& ws, const CoefficientSet& coeffs, const Grid1D& grid) {
  return synthesize_partial(ws, coeffs, std::vector<Grid1D>{grid});
}

// ---------------------------------------------------------------------------
// Point-mass functionals

/// mu = sum_i w_i delta^{(k)}_{x_i}, acting by <mu, g> = sum_i w_i (-1)^k g^{(k)}(x_i).
struct PointMasses {
  std::vector<double> points;
  std::vector<cplx> weights;
  int derivative_order = 0;

  void validate() const {
    if (points.empty() || points.size() != weights.size())
      throw PreconditionError("point masses need matching nonempty points and weights");
    if (derivative_order < 0 || derivative_order > max_derivative_order) throw PreconditionError("derivative order cap");
    for (double x : points)
      if (!std::isfinite(x)) throw PreconditionError("point masses need finite points");
  }

  cplx pair(const std::function<cplx(double, int)>& g) const {
    const double sign = derivative_order % 2 ? -1.0 : 1.0;
    cplx s{};
    for (std::size_t i = 0; i < points.size(); ++i) s += weights[i] * sign * g(points[i], derivative_order);
    return s;
  }
};

/// c_lambda(mu) = <mu, conj(psi_lambda)> over a 1-D window; derivatives move
/// onto the atom by spectral differentiation.
inline CoefficientSet analyze_point_masses(const WaveletSystem& ws, const PointMasses& mu, const IndexWindow& window) {
  mu.validate();
  if (window.d != 1) throw PreconditionError("point-mass analysis supports d = 1");
  const int k = mu.derivative_order;
  CoefficientSet cs;
  cs.window = window;
  cs.source_descriptor = "point-masses";
  const auto dspec = derivative_spectrum(ws.psi_hat, k);
  const auto idx = window.indices();
  std::vector<cplx> vals(idx.size());
  parallel_for(idx.size(), [&](std::size_t j) {
    const int m = idx[j].m;
    const double s = std::ldexp(1.0, m);
    std::vector<double> t(mu.points.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = s * mu.points[i] - static_cast<double>(idx[j].n[0]);
    const auto at = synthesize(dspec, t);
    const double amp = std::sqrt(s) * std::pow(s, k) * (k % 2 ? -1.0 : 1.0);
    cplx acc{};
    for (std::size_t i = 0; i < t.size(); ++i) acc += mu.weights[i] * amp * std::conj(at[i]);
    vals[j] = acc;
  });
  for (std::size_t j = 0; j < idx.size(); ++j) cs.coefficients.emplace(idx[j], vals[j]);
  return cs;
}

// ---------------------------------------------------------------------------
// Parseval

struct ParsevalReport {
  cplx lhs;  // int f g
  cplx rhs;  // sum c^psi(f) c^{conj psi}(g)
  double gap = 0.0;
  double bessel_f = 0.0;  // sum |c^psi(f)|^2
  double norm_f_sq = 0.0;
};

/// Bilinear pairing int f g against the coefficient pairing, reusing the
/// already computed coefficients cf of f.
inline ParsevalReport parseval_check(const WaveletSystem& ws, const SampledFunction& f, const CoefficientSet& cf,
                                     const SampledFunction& g, const AnalyzeOptions& opt = {}) {
  if (!f.same_grid(g)) throw PreconditionError("Parseval check needs f and g on the same grid");
  AnalyzeOptions og = opt;
  og.conjugate_family = true;
  const auto cg = analyze(ws, g, cf.window, og);
  ParsevalReport r;
  std::vector<cplx> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
  r.lhs = integrate(SampledFunction(f.axes(), std::move(prod)));
  std::vector<cplx> terms;
  terms.reserve(cf.coefficients.size());
  for (const auto& [idx, c] : cf.coefficients) terms.push_back(c * cg.coefficients.at(idx));
  r.rhs = pairwise_sum<cplx>(terms);
  r.gap = std::abs(r.lhs - r.rhs);
  r.bessel_f = cf.energy();
  r.norm_f_sq = std::abs(inner_product(f, f));
  return r;
}

/// Bilinear pairing int f g against the coefficient pairing over the window.
inline ParsevalReport parseval_check(const WaveletSystem& ws, const SampledFunction& f, const SampledFunction& g,
                                     const IndexWindow& window, const AnalyzeOptions& opt = {}) {
  if (!f.same_grid(g)) throw PreconditionError("Parseval check needs f and g on the same grid");
  AnalyzeOptions of = opt;
  of.conjugate_family = false;
  return parseval_check(ws, f, analyze(ws, f, window, of), g, opt);
}

}  // namespace subexp
