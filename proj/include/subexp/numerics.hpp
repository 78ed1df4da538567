#pragma once

// Grids, sampled functions, band-limited spectra and the quadrature/synthesis
// primitives everything else is built on.
//
// Fourier convention: f^(xi) = int f(x) e^{-i x xi} dx, inverse carries 1/(2 pi).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace subexp {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parameter or input outside an operation's domain.
struct PreconditionError : Error {
  using Error::Error;
};

/// A numerical consistency check inside an operation did not hold.
struct NumericalError : Error {
  using Error::Error;
};

/// Serialized data could not be parsed or is inconsistent.
struct FormatError : Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Parallelism

/// Worker count: SUBEXP_WAVELETS_THREADS if set, otherwise hardware concurrency.
inline unsigned worker_count() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SUBEXP_WAVELETS_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, hw));
  }
  return hw;
}

/// Runs body(i) for i in [0, n). Each index is written by exactly one worker,
/// so results do not depend on the schedule.
template <typename Body>
void parallel_for(std::size_t n, Body&& body) {
  const unsigned workers = std::min<std::size_t>(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

/// Short scientific rendering for human-readable report details.
inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Summation

/// Fixed-order pairwise summation.
template <typename T>
T pairwise_sum(std::span<const T> v) {
  constexpr std::size_t block = 32;
  if (v.size() <= block) {
    T s{};
    for (const auto& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// ---------------------------------------------------------------------------
// Grids

struct Grid1D {
  double origin = 0.0;
  double spacing = 1.0;
  std::size_t count = 2;

  Grid1D() = default;
  Grid1D(double origin_, double spacing_, std::size_t count_)
      : origin(origin_), spacing(spacing_), count(count_) {
    if (!(spacing > 0.0) || !std::isfinite(spacing) || !std::isfinite(origin))
      throw PreconditionError("grid spacing must be positive and finite");
    if (count < 2) throw PreconditionError("grid needs at least two points");
  }

  /// Grid from lo to hi inclusive with the given spacing; hi - lo must be a
  /// multiple of the spacing up to rounding.
  static Grid1D span(double lo, double hi, double spacing) {
    const double steps = (hi - lo) / spacing;
    const auto n = static_cast<std::size_t>(std::llround(steps));
    if (std::abs(steps - static_cast<double>(n)) > 1e-9 * std::max(1.0, steps))
      throw PreconditionError("grid extent is not a multiple of the spacing");
    return Grid1D(lo, spacing, n + 1);
  }

  double point(std::size_t i) const { return origin + static_cast<double>(i) * spacing; }
  double last() const { return point(count - 1); }
  double extent() const { return static_cast<double>(count - 1) * spacing; }

  bool operator==(const Grid1D& o) const {
    return count == o.count && origin == o.origin && spacing == o.spacing;
  }
};

/// Complex samples on a tensor grid of dimension 1..3 (last axis fastest).
class SampledFunction {
 public:
  SampledFunction() = default;

  SampledFunction(std::vector<Grid1D> axes, std::vector<cplx> values)
      : axes_(std::move(axes)), values_(std::move(values)) {
    if (axes_.empty() || axes_.size() > 3)
      throw PreconditionError("sampled function dimension must be 1, 2 or 3");
    if (values_.size() != total_points(axes_))
      throw PreconditionError("value count does not match grid");
  }

  SampledFunction(const Grid1D& grid, std::vector<cplx> values)
      : SampledFunction(std::vector<Grid1D>{grid}, std::move(values)) {}

  static SampledFunction zeros(std::vector<Grid1D> axes) {
    const std::size_t n = total_points(axes);
    return SampledFunction(std::move(axes), std::vector<cplx>(n));
  }

  /// Samples fn at every point of a 1-D grid.
  template <typename Fn>
  static SampledFunction from_function(const Grid1D& grid, Fn&& fn) {
    std::vector<cplx> v(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) v[i] = fn(grid.point(i));
    return SampledFunction(grid, std::move(v));
  }

  std::size_t dimension() const { return axes_.size(); }
  const std::vector<Grid1D>& axes() const { return axes_; }
  const Grid1D& grid() const { return axes_.front(); }
  std::span<const cplx> values() const { return values_; }
  std::vector<cplx>& mutable_values() { return values_; }
  std::size_t size() const { return values_.size(); }
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const {
    return std::all_of(values_.begin(), values_.end(),
                       [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
  }

  bool same_grid(const SampledFunction& o) const { return axes_ == o.axes_; }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& z : values_) m = std::max(m, std::abs(z));
    return m;
  }

  static std::size_t total_points(const std::vector<Grid1D>& axes) {
    std::size_t n = 1;
    for (const auto& a : axes) n *= a.count;
    return n;
  }

 private:
  std::vector<Grid1D> axes_;
  std::vector<cplx> values_;
};

// ---------------------------------------------------------------------------
// Spectra

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Compactly supported Fourier-side function sampled on a uniform grid.
/// Values are exactly zero at grid points outside the declared support.
class SpectrumOnBand {
 public:
  SpectrumOnBand() = default;

  SpectrumOnBand(Grid1D grid, std::vector<cplx> values, std::vector<Interval> support)
      : grid_(grid), values_(std::move(values)), support_(std::move(support)) {
    if (values_.size() != grid_.count) throw PreconditionError("spectrum value count does not match grid");
    if (support_.empty() || support_.size() > 2)
      throw PreconditionError("declared support must be one or two intervals");
    const Interval band{grid_.origin, grid_.last()};
    for (const auto& iv : support_) {
      if (!(iv.lo <= iv.hi) || iv.lo < band.lo - 1e-12 || iv.hi > band.hi + 1e-12)
        throw PreconditionError("declared support must lie inside the band");
    }
    for (std::size_t i = 0; i < grid_.count; ++i) {
      if (!in_support(grid_.point(i)) && values_[i] != cplx{})
        throw PreconditionError("spectrum is nonzero outside its declared support");
    }
    build_ranges();
  }

  /// Evaluates fn on grid points inside the support; everything else is 0.
  template <typename Fn>
  static SpectrumOnBand from_function(const Grid1D& grid, std::vector<Interval> support, Fn&& fn) {
    std::vector<cplx> v(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
      const double xi = grid.point(i);
      for (const auto& iv : support) {
        if (iv.contains(xi)) {
          v[i] = fn(xi);
          break;
        }
      }
    }
    return SpectrumOnBand(grid, std::move(v), std::move(support));
  }

  const Grid1D& grid() const { return grid_; }
  Interval band() const { return {grid_.origin, grid_.last()}; }
  std::span<const cplx> values() const { return values_; }
  const std::vector<Interval>& support() const { return support_; }

  bool in_support(double xi) const {
    return std::any_of(support_.begin(), support_.end(), [&](const Interval& iv) { return iv.contains(xi); });
  }

  /// Index ranges [first, last] covering the support; synthesis sums only these.
  const std::vector<std::pair<std::size_t, std::size_t>>& ranges() const { return ranges_; }

  /// Trapezoid weight at index i (1/2 at the two band ends).
  double weight(std::size_t i) const { return (i == 0 || i + 1 == grid_.count) ? 0.5 : 1.0; }

  /// Pointwise map of values (support unchanged).
  template <typename Fn>
  SpectrumOnBand transformed(Fn&& fn) const {
    std::vector<cplx> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != cplx{}) v[i] = fn(grid_.point(i), v[i]);
    return SpectrumOnBand(grid_, std::move(v), support_);
  }

 private:
  void build_ranges() {
    ranges_.clear();
    for (const auto& iv : support_) {
      const double lo = std::ceil((iv.lo - grid_.origin) / grid_.spacing - 1e-9);
      const double hi = std::floor((iv.hi - grid_.origin) / grid_.spacing + 1e-9);
      const auto first = static_cast<std::size_t>(std::max(0.0, lo));
      const auto last = static_cast<std::size_t>(std::min(hi, static_cast<double>(grid_.count - 1)));
      if (first <= last) ranges_.emplace_back(first, last);
    }
  }

  Grid1D grid_;
  std::vector<cplx> values_;
  std::vector<Interval> support_;
  std::vector<std::pair<std::size_t, std::size_t>> ranges_;
};

// ---------------------------------------------------------------------------
// Quadrature

namespace detail {

inline void require_finite(const SampledFunction& f) {
  if (!f.all_finite()) throw PreconditionError("invalid samples");
}

inline double trapezoid_weight(const Grid1D& g, std::size_t i) {
  return (i == 0 || i + 1 == g.count) ? 0.5 * g.spacing : g.spacing;
}

}  // namespace detail

/// Tensor trapezoid rule over the full grid extent.
inline cplx integrate(const SampledFunction& f) {
  detail::require_finite(f);
  const auto& axes = f.axes();
  std::vector<cplx> terms(f.size());
  if (axes.size() == 1) {
    for (std::size_t i = 0; i < f.size(); ++i) terms[i] = detail::trapezoid_weight(axes[0], i) * f[i];
  } else {
    std::size_t idx = 0;
    const std::size_t n0 = axes[0].count;
    const std::size_t n1 = axes[1].count;
    const std::size_t n2 = axes.size() == 3 ? axes[2].count : 1;
    for (std::size_t i = 0; i < n0; ++i) {
      const double wi = detail::trapezoid_weight(axes[0], i);
      for (std::size_t j = 0; j < n1; ++j) {
        const double wij = wi * detail::trapezoid_weight(axes[1], j);
        for (std::size_t k = 0; k < n2; ++k, ++idx) {
          const double w = axes.size() == 3 ? wij * detail::trapezoid_weight(axes[2], k) : wij;
          terms[idx] = w * f[idx];
        }
      }
    }
  }
  return pairwise_sum<cplx>(terms);
}

/// Sesquilinear L2 product: integral of f * conj(g).
inline cplx inner_product(const SampledFunction& f, const SampledFunction& g) {
  if (!f.same_grid(g)) throw PreconditionError("inner product requires identical grids");
  detail::require_finite(f);
  detail::require_finite(g);
  std::vector<cplx> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * std::conj(g[i]);
  return integrate(SampledFunction(f.axes(), std::move(prod)));
}

inline double l2_norm(const SampledFunction& f) { return std::sqrt(std::abs(inner_product(f, f))); }

// ---------------------------------------------------------------------------
// Synthesis

inline constexpr int max_derivative_order = 60;

namespace detail {

// Re-anchor the phase recurrence this often to bound rounding drift.
inline constexpr std::size_t reanchor_stride = 64;

/// (1/2pi) sum_l w_l v_l e^{i x xi_l} dxi for one point.
inline cplx synthesize_point(const SpectrumOnBand& s, std::span<const cplx> vals, double x) {
  const Grid1D& g = s.grid();
  cplx total{};
  for (const auto& [first, last] : s.ranges()) {
    const cplx step = std::polar(1.0, x * g.spacing);
    cplx acc{};
    cplx z{};
    for (std::size_t l = first; l <= last; ++l) {
      if ((l - first) % reanchor_stride == 0) z = std::polar(1.0, x * g.point(l));
      acc += (s.weight(l) * vals[l]) * z;
      z *= step;
    }
    total += acc;
  }
  return total * (g.spacing / two_pi);
}

}  // namespace detail

/// Inverse transform of a band spectrum at arbitrary points.
inline std::vector<cplx> synthesize(const SpectrumOnBand& spec, std::span<const double> x_points) {
  if (x_points.empty()) throw PreconditionError("synthesize needs at least one point");
  for (double x : x_points)
    if (!std::isfinite(x)) throw PreconditionError("synthesis points must be finite");
  std::vector<cplx> out(x_points.size());
  const auto vals = spec.values();
  parallel_for(x_points.size(), [&](std::size_t i) { out[i] = detail::synthesize_point(spec, vals, x_points[i]); });
  return out;
}

/// Inverse transform on the lattice t_j = t0 + j*step, j < count. Vectorized
/// over frequencies with periodic exact re-anchoring of the phases.
///
/// decimation > 1 keeps every decimation-th spectral sample. The result then
/// aliases with period 2pi/(decimation*spacing) instead of 2pi/spacing, which
/// is harmless when the synthesized function is negligible at that distance.
inline std::vector<cplx> synthesize_lattice(const SpectrumOnBand& spec, double t0, double step, std::size_t count,
                                            std::size_t decimation = 1) {
  std::vector<cplx> out(count);
  if (count == 0) return out;
  if (decimation == 0) throw PreconditionError("decimation must be positive");
  const Grid1D& g = spec.grid();
  std::vector<std::size_t> idx;
  for (const auto& [first, last] : spec.ranges())
    for (std::size_t l = first; l <= last; ++l)
      if (l % decimation == 0 && spec.values()[l] != cplx{}) idx.push_back(l);
  const std::size_t nf = idx.size();
  std::vector<double> vr(nf), vi(nf), xi(nf), rr(nf), ri(nf);
  for (std::size_t k = 0; k < nf; ++k) {
    const cplx v = static_cast<double>(decimation) * spec.weight(idx[k]) * spec.values()[idx[k]];
    vr[k] = v.real();
    vi[k] = v.imag();
    xi[k] = g.point(idx[k]);
    rr[k] = std::cos(step * xi[k]);
    ri[k] = std::sin(step * xi[k]);
  }
  constexpr std::size_t block = 256;
  const std::size_t nblocks = (count + block - 1) / block;
  const double scale = g.spacing / two_pi;
  parallel_for(nblocks, [&](std::size_t b) {
    std::vector<double> zr(nf), zi(nf);
    const std::size_t j0 = b * block;
    const std::size_t j1 = std::min(count, j0 + block);
    for (std::size_t j = j0; j < j1; ++j) {
      if ((j - j0) % detail::reanchor_stride == 0) {
        const double t = t0 + static_cast<double>(j) * step;
        for (std::size_t k = 0; k < nf; ++k) {
          zr[k] = std::cos(t * xi[k]);
          zi[k] = std::sin(t * xi[k]);
        }
      }
      double ar = 0.0, ai = 0.0;
      for (std::size_t k = 0; k < nf; ++k) {
        ar += vr[k] * zr[k] - vi[k] * zi[k];
        ai += vr[k] * zi[k] + vi[k] * zr[k];
        const double nr = zr[k] * rr[k] - zi[k] * ri[k];
        const double ni = zr[k] * ri[k] + zi[k] * rr[k];
        zr[k] = nr;
        zi[k] = ni;
      }
      out[j] = cplx(ar, ai) * scale;
    }
  });
  return out;
}

/// Synthesis on every point of a 1-D grid.
inline SampledFunction synthesize(const SpectrumOnBand& spec, const Grid1D& grid) {
  return SampledFunction(grid, synthesize_lattice(spec, grid.origin, grid.spacing, grid.count));
}

/// Spectrum multiplied by (i xi)^order.
inline SpectrumOnBand derivative_spectrum(const SpectrumOnBand& spec, int order) {
  if (order < 0) throw PreconditionError("derivative order must be nonnegative");
  if (order > max_derivative_order) throw PreconditionError("derivative order cap");
  if (order == 0) return spec;
  return spec.transformed([order](double xi, cplx v) { return v * std::pow(cplx(0.0, xi), order); });
}

/// Derivative of the synthesized function, computed on the Fourier side.
inline std::vector<cplx> spectral_derivative(const SpectrumOnBand& spec, int order, std::span<const double> x_points) {
  return synthesize(derivative_spectrum(spec, order), x_points);
}

/// Forward trapezoid transform F(xi) = sum_j w_j f(x_j) e^{-i x_j xi} of 1-D samples.
inline std::vector<cplx> forward_transform(const SampledFunction& f, std::span<const double> xi_points) {
  if (f.dimension() != 1) throw PreconditionError("forward transform needs 1-D samples");
  detail::require_finite(f);
  const Grid1D& g = f.grid();
  std::vector<cplx> out(xi_points.size());
  parallel_for(xi_points.size(), [&](std::size_t k) {
    const double xi = xi_points[k];
    const cplx step = std::polar(1.0, -g.spacing * xi);
    cplx acc{};
    cplx z{};
    for (std::size_t j = 0; j < g.count; ++j) {
      if (j % detail::reanchor_stride == 0) z = std::polar(1.0, -g.point(j) * xi);
      acc += detail::trapezoid_weight(g, j) * f[j] * z;
      z *= step;
    }
    out[k] = acc;
  });
  return out;
}

}  // namespace subexp
