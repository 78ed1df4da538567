#pragma once

// Discretized Gelfand-Shilov seminorms, subexponential envelope fits and the
// weighted coefficient sequence norms. All sups are lower bounds over finite probes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "coefficients.hpp"
#include "dh_construction.hpp"
#include "numerics.hpp"
#include "wavelet_expansion.hpp"

namespace subexp {

inline constexpr double weight_exponent_limit = 700.0;

struct SeminormParams {
  double rho1 = 0.0;
  double rho2 = 2.0;
  double h = 0.5;
  double c = 0.1;
  int max_beta = 8;

  void validate() const {
    if (!(rho1 >= 0.0) || !(rho2 > 0.0) || !(h > 0.0) || !(c > 0.0) || !std::isfinite(rho1) || !std::isfinite(rho2) ||
        !std::isfinite(h) || !std::isfinite(c))
      throw PreconditionError("seminorm parameters need rho1 >= 0, rho2 > 0, h > 0, c > 0");
    if (max_beta < 0 || max_beta > max_derivative_order) throw PreconditionError("derivative order cap");
  }
};

struct SeminormEstimate {
  double value = 0.0;  // lower bound for the true sup
  std::size_t probes_used = 0;
  std::size_t probes_excluded = 0;  // weight exponent above the overflow limit
  int argmax_beta = 0;
  double argmax_x = 0.0;
};

/// max over probes x and beta <= max_beta of (h^beta / beta!^rho1) e^{c|x|^{1/rho2}} |f^(beta)(x)|.
inline SeminormEstimate seminorm_estimate(const SpectrumOnBand& f_hat, const SeminormParams& p,
                                          std::span<const double> probes) {
  p.validate();
  if (probes.empty()) throw PreconditionError("seminorm estimate needs probe points");
  SeminormEstimate est;
  for (int beta = 0; beta <= p.max_beta; ++beta) {
    const double log_pre = beta * std::log(p.h) - p.rho1 * std::lgamma(beta + 1.0);
    std::vector<double> xs;
    std::vector<double> log_w;
    for (double x : probes) {
      const double e = log_pre + p.c * std::pow(std::abs(x), 1.0 / p.rho2);
      if (e > weight_exponent_limit) {
        ++est.probes_excluded;
        continue;
      }
      xs.push_back(x);
      log_w.push_back(e);
    }
    if (xs.empty()) continue;
    const auto vals = spectral_derivative(f_hat, beta, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ++est.probes_used;
      const double v = std::exp(log_w[i]) * std::abs(vals[i]);
      if (v > est.value) {
        est.value = v;
        est.argmax_beta = beta;
        est.argmax_x = xs[i];
      }
    }
  }
  return est;
}

// ---------------------------------------------------------------------------
// Decay fits

struct DecayFit {
  double amplitude_C = 0.0;
  double rate_c = 0.0;
  double exponent = 0.0;
  double r_squared = 0.0;
  std::size_t n_envelope_points = 0;
};

struct DecaySample {
  double x = 0.0;
  double value = 0.0;
};

inline constexpr double envelope_floor = 1e-14;
inline constexpr std::size_t min_envelope_points = 10;

/// Points that exceed every value to their right (running max from the right),
/// restricted to values above the floor. Samples must be ordered by |x|.
inline std::vector<DecaySample> upper_envelope(std::span<const DecaySample> samples) {
  std::vector<DecaySample> env;
  double right_max = -1.0;
  for (std::size_t i = samples.size(); i-- > 0;) {
    const double v = samples[i].value;
    if (v > right_max) {
      right_max = v;
      if (v > envelope_floor) env.push_back({std::abs(samples[i].x), v});
    }
  }
  std::reverse(env.begin(), env.end());
  return env;
}

namespace detail {

/// Least squares for log y = A - c x^p; returns (A, c, R^2).
inline DecayFit fit_fixed_exponent(std::span<const DecaySample> env, double p) {
  const std::size_t n = env.size();
  double su = 0, sv = 0;
  std::vector<double> u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = std::pow(env[i].x, p);
    v[i] = std::log(env[i].value);
    su += u[i];
    sv += v[i];
  }
  const double mu = su / static_cast<double>(n), mv = sv / static_cast<double>(n);
  double suu = 0, suv = 0, svv = 0;
  for (std::size_t i = 0; i < n; ++i) {
    suu += (u[i] - mu) * (u[i] - mu);
    suv += (u[i] - mu) * (v[i] - mv);
    svv += (v[i] - mv) * (v[i] - mv);
  }
  DecayFit fit;
  fit.exponent = p;
  fit.n_envelope_points = n;
  if (suu <= 0.0) {
    fit.amplitude_C = std::exp(mv);
    return fit;
  }
  const double slope = suv / suu;
  fit.rate_c = -slope;
  fit.amplitude_C = std::exp(mv - slope * mu);
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = v[i] - (mv + slope * (u[i] - mu));
    sse += r * r;
  }
  fit.r_squared = svv > 0.0 ? std::clamp(1.0 - sse / svv, 0.0, 1.0) : 1.0;
  return fit;
}

}  // namespace detail

struct ExponentMode {
  bool free = false;
  double exponent = 0.5;  // used when not free

  static ExponentMode fixed(double e) { return {false, e}; }
  static ExponentMode free_search() { return {true, 0.0}; }
};

/// Fits log|f| ~ log C - c x^{1/rho} on the upper envelope; free mode searches
/// rho over [1, 4] in steps of 0.05 for the best R^2.
inline DecayFit subexp_decay_fit(std::span<const DecaySample> samples, ExponentMode mode) {
  const auto env = upper_envelope(samples);
  if (env.size() < min_envelope_points) throw PreconditionError("insufficient envelope");
  if (!mode.free) {
    if (!(mode.exponent > 0.0)) throw PreconditionError("fixed decay exponent must be positive");
    return detail::fit_fixed_exponent(env, mode.exponent);
  }
  DecayFit best;
  best.r_squared = -1.0;
  for (int i = 0; i <= 60; ++i) {
    const double rho = 1.0 + 0.05 * i;
    const auto fit = detail::fit_fixed_exponent(env, 1.0 / rho);
    if (fit.r_squared > best.r_squared) best = fit;
  }
  return best;
}

inline std::vector<DecaySample> to_decay_samples(std::span<const DecayPoint> profile) {
  std::vector<DecaySample> s;
  s.reserve(profile.size());
  for (const auto& p : profile) s.push_back({p.x, p.magnitude});
  return s;
}

// ---------------------------------------------------------------------------
// Sequence norms

struct SequenceNormParams {
  double s = 3.0;
  double t = 4.0;
  double rho1 = 0.0;
  double rho2 = 2.0;
  double k = 0.5;

  void validate(bool need_k = true) const {
    if (!(t > rho2) || !(s > rho1)) throw PreconditionError("sequence norm needs t > rho2 and s > rho1");
    if (need_k && !(k >= 0.0)) throw PreconditionError("sequence norm needs k >= 0");
  }
};

/// w(lambda) = (2^{-m})^{1/(t-rho2)} + (2^m)^{1/(s-rho1)} + |n 2^{-m}|^{1/t}, |n| Euclidean.
inline double sequence_weight(const WaveletIndex& l, const SequenceNormParams& p) {
  const double m = static_cast<double>(l.m);
  double nn = 0.0;
  for (long v : l.n) nn += static_cast<double>(v) * static_cast<double>(v);
  const double pos = std::sqrt(nn) * std::exp2(-m);
  return std::exp2(-m / (p.t - p.rho2)) + std::exp2(m / (p.s - p.rho1)) + std::pow(pos, 1.0 / p.t);
}

struct SequenceNormResult {
  double value = 0.0;
  std::size_t skipped = 0;  // overflowing weight on a negligible coefficient
};

inline SequenceNormResult sequence_norm_report(const CoefficientSet& coeffs, const SequenceNormParams& p) {
  p.validate();
  SequenceNormResult r;
  for (const auto& [idx, c] : coeffs.coefficients) {
    const double mag = std::abs(c);
    if (mag == 0.0) continue;
    const double e = p.k * sequence_weight(idx, p);
    double v;
    if (e <= weight_exponent_limit) {
      v = mag * std::exp(e);
    } else if (mag > 1e-300) {
      v = std::exp(std::log(mag) + e);  // +inf once it truly overflows
    } else {
      ++r.skipped;
      continue;
    }
    r.value = std::max(r.value, v);
  }
  return r;
}

inline double sequence_norm(const CoefficientSet& coeffs, const SequenceNormParams& p) {
  return sequence_norm_report(coeffs, p).value;
}

struct FeasibleK {
  double k = 0.0;
  bool vacuous = false;  // no nonzero coefficient: any k works, capped
};

inline constexpr double feasible_k_cap = 64.0;

/// Largest k (bisection to 1e-3) with sequence_norm <= budget.
inline FeasibleK max_feasible_k(const CoefficientSet& coeffs, SequenceNormParams p, double budget) {
  p.validate(false);
  const bool any = std::any_of(coeffs.coefficients.begin(), coeffs.coefficients.end(),
                               [](const auto& kv) { return kv.second != cplx{}; });
  if (!any) return {feasible_k_cap, true};
  auto ok = [&](double k) {
    p.k = k;
    return sequence_norm(coeffs, p) <= budget;
  };
  if (!ok(0.0)) return {0.0, false};
  if (ok(feasible_k_cap)) return {feasible_k_cap, false};
  double lo = 0.0, hi = feasible_k_cap;
  while (hi - lo > 1e-3) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return {lo, false};
}

// ---------------------------------------------------------------------------
// Half-plane weighted norm of the wavelet transform

struct HalfplaneParams {
  double h = 0.1;
  double t = 4.0;
  double tau1 = 1.0;
  double tau2 = 1.0;
  int max_alpha = 0;  // derivative order in a (<= 2)
  int max_beta = 0;   // derivative order in b (<= 2)
};

struct HalfplaneSample {
  double b = 0.0;
  double a = 1.0;
};

namespace detail {

/// d^alpha/da^alpha of W(b, a) by central differences in log a.
inline double cwt_a_derivative(const WaveletSystem& ws, const SpectrumOnBand& f_hat, double b, double a, int alpha,
                               int beta) {
  if (alpha == 0) return std::abs(cwt_from_spectrum(ws, f_hat, b, a, beta));
  const double d = 1e-3;
  const cplx wp = cwt_from_spectrum(ws, f_hat, b, a * std::exp(d), beta);
  const cplx wm = cwt_from_spectrum(ws, f_hat, b, a * std::exp(-d), beta);
  const cplx du = (wp - wm) / (2.0 * d);
  if (alpha == 1) return std::abs(du / a);
  const cplx w0 = cwt_from_spectrum(ws, f_hat, b, a, beta);
  const cplx duu = (wp - 2.0 * w0 + wm) / (d * d);
  return std::abs((duu - du) / (a * a));
}

}  // namespace detail

/// max over samples and alpha, beta of e^{h(a^{1/tau1} + a^{-1/tau2} + |b|^{1/t})} |d_a^alpha d_b^beta W(b, a)|.
inline double halfplane_norm_probe(const WaveletSystem& ws, const SpectrumOnBand& f_hat, const HalfplaneParams& p,
                                   std::span<const HalfplaneSample> samples) {
  if (p.max_alpha < 0 || p.max_alpha > 2 || p.max_beta < 0 || p.max_beta > 2)
    throw PreconditionError("half-plane probe derivative orders must lie in 0..2");
  if (!(p.tau1 > 0.0) || !(p.tau2 > 0.0) || !(p.t > 0.0)) throw PreconditionError("half-plane exponents must be positive");
  for (const auto& s : samples)
    if (!(s.a > 0.0)) throw PreconditionError("half-plane samples need a > 0");
  double best = 0.0;
  for (const auto& s : samples) {
    const double e = p.h * (std::pow(s.a, 1.0 / p.tau1) + std::pow(s.a, -1.0 / p.tau2) + std::pow(std::abs(s.b), 1.0 / p.t));
    if (e > weight_exponent_limit) continue;
    for (int alpha = 0; alpha <= p.max_alpha; ++alpha)
      for (int beta = 0; beta <= p.max_beta; ++beta)
        best = std::max(best, std::exp(e) * detail::cwt_a_derivative(ws, f_hat, s.b, s.a, alpha, beta));
  }
  return best;
}

}  // namespace subexp
