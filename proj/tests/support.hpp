#pragma once

#include "subexp/subexp.hpp"

namespace subexp::testing {

/// Reference system (a = 1, rho2 = 2), built once per test binary.
inline const WaveletSystem& reference_system() {
  static const WaveletSystem ws = build_wavelet_system(1.0, 2.0);
  return ws;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace subexp::testing
