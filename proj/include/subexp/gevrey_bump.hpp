#pragma once

// Compactly supported Gevrey bump x -> C exp(-(1 - (x/a)^2)^(-1/(rho-1))) on |x| < a,
// normalized to total mass pi/2, with a tabulated primitive.

#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

#include "numerics.hpp"

namespace subexp {

namespace detail {

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 8> gl8_nodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> gl8_weights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

inline double unnormalized_bump(double x, double a, double rho) {
  const double u = x / a;
  const double w = 1.0 - u * u;
  if (!(w > 0.0)) return 0.0;
  return std::exp(-std::pow(w, -1.0 / (rho - 1.0)));
}

template <typename Fn>
double gauss_legendre(Fn&& fn, double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double s = 0.0;
  for (std::size_t k = 0; k < gl8_nodes.size(); ++k) s += gl8_weights[k] * fn(mid + half * gl8_nodes[k]);
  return s * half;
}

}  // namespace detail

inline constexpr std::size_t default_cumulative_cells = 16384;

/// Integral of the unnormalized bump over [-a, a] using `cells` Gauss-Legendre panels.
inline double unnormalized_bump_mass(double a, double rho, std::size_t cells) {
  const double h = 2.0 * a / static_cast<double>(cells);
  std::vector<double> parts(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double lo = -a + static_cast<double>(i) * h;
    parts[i] = detail::gauss_legendre([&](double x) { return detail::unnormalized_bump(x, a, rho); }, lo, lo + h);
  }
  return pairwise_sum<double>(parts);
}

class GevreyBump {
 public:
  double a = 1.0;
  double rho = 2.0;
  double norm_constant = 1.0;
  double target_integral = pi / 2.0;

  GevreyBump() = default;

  GevreyBump(double a_, double rho_, std::size_t cells = default_cumulative_cells) : a(a_), rho(rho_) {
    norm_constant = target_integral / unnormalized_bump_mass(a, rho, cells);
    build_table(cells);
  }

  /// Exactly 0 for |x| >= a.
  double operator()(double x) const { return norm_constant * detail::unnormalized_bump(x, a, rho); }

  /// Primitive from -infinity. Computed on the left half and reflected, so
  /// cumulative(x) + cumulative(-x) = pi/2 holds to rounding.
  double cumulative(double xi) const {
    if (xi <= -a) return 0.0;
    if (xi >= a) return target_integral;
    if (xi > 0.0) return target_integral - left_cumulative(-xi);
    return left_cumulative(xi);
  }

  /// Taylor coefficients f^(n)(x)/n! for n = 0..order (forward-mode series arithmetic).
  std::vector<double> taylor(double x, int order) const {
    std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
    const double u0 = x / a;
    const double w0 = 1.0 - u0 * u0;
    if (!(w0 > 0.0)) return out;
    const std::size_t n = out.size();
    // w(t) = 1 - (x + t)^2 / a^2
    std::vector<double> w(n, 0.0);
    w[0] = w0;
    if (n > 1) w[1] = -2.0 * x / (a * a);
    if (n > 2) w[2] = -1.0 / (a * a);
    // g = w^alpha
    const double alpha = -1.0 / (rho - 1.0);
    std::vector<double> g(n, 0.0);
    g[0] = std::pow(w0, alpha);
    for (std::size_t j = 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 1; k <= std::min<std::size_t>(j, 2); ++k)
        s += (alpha * static_cast<double>(k) - static_cast<double>(j - k)) * w[k] * g[j - k];
      g[j] = s / (static_cast<double>(j) * w0);
    }
    // e = exp(-g)
    out[0] = std::exp(-g[0]);
    for (std::size_t j = 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 1; k <= j; ++k) s -= static_cast<double>(k) * g[k] * out[j - k];
      out[j] = s / static_cast<double>(j);
    }
    for (auto& v : out) v *= norm_constant;
    return out;
  }

  /// n-th derivative at x.
  double derivative(double x, int order) const {
    const auto t = taylor(x, order);
    return t.back() * std::exp(std::lgamma(order + 1.0));
  }

  std::size_t table_cells() const { return cells_; }

 private:
  void build_table(std::size_t cells) {
    cells_ = cells;
    step_ = 2.0 * a / static_cast<double>(cells);
    const std::size_t half = cells / 2 + 1;
    knots_.assign(half + 1, 0.0);
    for (std::size_t i = 0; i < half; ++i) {
      const double lo = -a + static_cast<double>(i) * step_;
      knots_[i + 1] = knots_[i] + detail::gauss_legendre([this](double x) { return (*this)(x); }, lo, lo + step_);
    }
  }

  double left_cumulative(double xi) const {
    const double s = (xi + a) / step_;
    auto i = static_cast<std::size_t>(s);
    if (i + 1 >= knots_.size()) i = knots_.size() - 2;
    const double t = s - static_cast<double>(i);
    const double x0 = -a + static_cast<double>(i) * step_;
    const double f0 = knots_[i], f1 = knots_[i + 1];
    const double d0 = (*this)(x0) * step_, d1 = (*this)(x0 + step_) * step_;
    const double t2 = t * t, t3 = t2 * t;
    // the cubic can undershoot by ~1e-150 next to the flat edge
    return std::max(0.0, (2 * t3 - 3 * t2 + 1) * f0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * f1 + (t3 - t2) * d1);
  }

  std::size_t cells_ = 0;
  double step_ = 0.0;
  std::vector<double> knots_;
};

/// Validated bump construction.
inline GevreyBump build_bump(double a, double rho) {
  if (!std::isfinite(a) || !(a > 0.0)) throw PreconditionError("bump half-width must be positive");
  if (!(a < pi / 3.0)) throw PreconditionError("bump half-width violates a < pi/3");
  if (!std::isfinite(rho) || !(rho > 1.0)) throw PreconditionError("Gevrey order must exceed 1");
  return GevreyBump(a, rho);
}

/// Free function form of GevreyBump::cumulative.
inline double cumulative(const GevreyBump& bump, double xi) { return bump.cumulative(xi); }

struct GevreyCertificate {
  std::vector<double> sup_derivatives;  // sup |bump^(n)| over the probe grid
  std::vector<double> ratios;           // r_n; r_0 = sup |bump|
  double h_estimate = 0.0;
  double tail_spread = 0.0;  // max/min over the last five ratios
  bool passed = false;
  static constexpr const char* method = "heuristic: Taylor-series derivatives sampled on a finite grid";
};

inline constexpr int max_gevrey_order = 20;

/// r_n = (sup|bump^(n)|)^(1/n) / n!^(rho/n). Bounded ratios indicate Gevrey-rho growth.
inline GevreyCertificate certify_gevrey(const GevreyBump& bump, int max_order, std::size_t probes = 20001) {
  if (max_order < 1 || max_order > max_gevrey_order)
    throw PreconditionError("Gevrey certificate order must lie in 1..20");
  const std::size_t nn = static_cast<std::size_t>(max_order) + 1;
  GevreyCertificate cert;
  cert.sup_derivatives.assign(nn, 0.0);
  const double h = 2.0 * bump.a / static_cast<double>(probes + 1);
  for (std::size_t i = 1; i <= probes; ++i) {
    const double x = -bump.a + static_cast<double>(i) * h;
    const auto t = bump.taylor(x, max_order);
    for (std::size_t n = 0; n < nn; ++n) {
      const double d = std::abs(t[n]) * std::exp(std::lgamma(static_cast<double>(n) + 1.0));
      if (std::isfinite(d)) cert.sup_derivatives[n] = std::max(cert.sup_derivatives[n], d);
    }
  }
  cert.sup_derivatives[0] = std::max(cert.sup_derivatives[0], bump(0.0));
  cert.ratios.assign(nn, 0.0);
  cert.ratios[0] = cert.sup_derivatives[0];
  double rmax = 0.0;
  for (std::size_t n = 1; n < nn; ++n) {
    const double dn = static_cast<double>(n);
    cert.ratios[n] = std::exp(std::log(cert.sup_derivatives[n]) / dn - bump.rho * std::lgamma(dn + 1.0) / dn);
    rmax = std::max(rmax, cert.ratios[n]);
  }
  cert.h_estimate = rmax > 0.0 ? 1.0 / rmax : 0.0;
  const std::size_t first = nn > 6 ? nn - 5 : 1;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t n = first; n < nn; ++n) {
    lo = std::min(lo, cert.ratios[n]);
    hi = std::max(hi, cert.ratios[n]);
  }
  cert.tail_spread = lo > 0.0 ? hi / lo : INFINITY;
  cert.passed = std::isfinite(cert.tail_spread) && cert.tail_spread < 10.0;
  return cert;
}

}  // namespace subexp
