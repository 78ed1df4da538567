#pragma once

// Wavelet indices lambda = (epsilon, m, n), finite index windows and coefficient tables.

#include <compare>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "numerics.hpp"

namespace subexp {

/// epsilon bit i selects the factor along axis i: 1 -> psi, 0 -> phi.
struct WaveletIndex {
  unsigned epsilon = 1;
  int m = 0;
  std::vector<long> n{0};

  WaveletIndex() = default;
  WaveletIndex(unsigned epsilon_, int m_, std::vector<long> n_) : epsilon(epsilon_), m(m_), n(std::move(n_)) {
    if (n.empty() || n.size() > 3) throw PreconditionError("wavelet index dimension must be 1, 2 or 3");
    if (epsilon == 0) throw PreconditionError("wavelet index epsilon must not be all zeros");
    if (epsilon >= (1u << n.size())) throw PreconditionError("wavelet index epsilon has bits beyond the dimension");
  }

  std::size_t dimension() const { return n.size(); }
  bool wavelet_along(std::size_t axis) const { return (epsilon >> axis) & 1u; }

  auto operator<=>(const WaveletIndex&) const = default;
  bool operator==(const WaveletIndex&) const = default;
};

struct IndexWindow {
  int M = 0;
  long N = 0;
  int d = 1;

  IndexWindow() = default;
  IndexWindow(int M_, long N_, int d_ = 1) : M(M_), N(N_), d(d_) {
    if (M < 0 || N < 0) throw PreconditionError("index window bounds must be nonnegative");
    if (d < 1 || d > 3) throw PreconditionError("index window dimension must be 1, 2 or 3");
  }

  std::size_t size() const {
    std::size_t per_shift = 1;
    for (int i = 0; i < d; ++i) per_shift *= static_cast<std::size_t>(2 * N + 1);
    return ((1u << d) - 1u) * static_cast<std::size_t>(2 * M + 1) * per_shift;
  }

  bool contains(const WaveletIndex& l) const {
    if (static_cast<int>(l.dimension()) != d || std::abs(l.m) > M) return false;
    for (long v : l.n)
      if (std::labs(v) > N) return false;
    return true;
  }

  /// All indices in (epsilon, m, n) lexicographic order.
  std::vector<WaveletIndex> indices() const {
    std::vector<WaveletIndex> out;
    out.reserve(size());
    const long side = 2 * N + 1;
    long shifts = 1;
    for (int i = 0; i < d; ++i) shifts *= side;
    for (unsigned eps = 1; eps < (1u << d); ++eps)
      for (int m = -M; m <= M; ++m)
        for (long s = 0; s < shifts; ++s) {
          std::vector<long> n(static_cast<std::size_t>(d));
          long r = s;
          for (int i = d - 1; i >= 0; --i) {
            n[static_cast<std::size_t>(i)] = r % side - N;
            r /= side;
          }
          out.emplace_back(eps, m, std::move(n));
        }
    return out;
  }

  bool operator==(const IndexWindow&) const = default;
};

struct CoefficientSet {
  IndexWindow window;
  std::map<WaveletIndex, cplx> coefficients;
  std::string source_descriptor;

  /// Checks that every window index is present and finite.
  void validate() const {
    if (coefficients.size() != window.size()) throw PreconditionError("coefficient set does not cover its window");
    for (const auto& [idx, c] : coefficients) {
      if (!window.contains(idx)) throw PreconditionError("coefficient index outside window");
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw PreconditionError("non-finite coefficient");
    }
  }

  double sup_abs() const {
    double s = 0.0;
    for (const auto& [idx, c] : coefficients) s = std::max(s, std::abs(c));
    return s;
  }

  double energy() const {
    std::vector<double> sq;
    sq.reserve(coefficients.size());
    for (const auto& [idx, c] : coefficients) sq.push_back(std::norm(c));
    return pairwise_sum<double>(sq);
  }

  /// Zero-filled set over a window.
  static CoefficientSet zeros(const IndexWindow& w, std::string source = {}) {
    CoefficientSet cs;
    cs.window = w;
    cs.source_descriptor = std::move(source);
    for (auto& idx : w.indices()) cs.coefficients.emplace(std::move(idx), cplx{});
    return cs;
  }
};

}  // namespace subexp
