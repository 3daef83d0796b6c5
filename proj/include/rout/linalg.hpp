#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "rout/error.hpp"

namespace rout::detail {

/// Solves A x = b in place (A row-major m x m, overwritten; b becomes x) by
/// Gaussian elimination with partial pivoting.
inline void solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t m) {
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    double best = std::fabs(a[col * m + col]);
    for (std::size_t row = col + 1; row < m; ++row) {
      const double v = std::fabs(a[row * m + col]);
      if (v > best) {
        best = v;
        piv = row;
      }
    }
    if (best < 1e-300) throw StructureError("dense solve: singular system");
    if (piv != col) {
      for (std::size_t k = 0; k < m; ++k) std::swap(a[col * m + k], a[piv * m + k]);
      std::swap(b[col], b[piv]);
    }
    const double inv = 1.0 / a[col * m + col];
    for (std::size_t row = col + 1; row < m; ++row) {
      const double f = a[row * m + col] * inv;
      if (f == 0.0) continue;
      a[row * m + col] = 0.0;
      for (std::size_t k = col + 1; k < m; ++k) a[row * m + k] -= f * a[col * m + k];
      b[row] -= f * b[col];
    }
  }
  for (std::size_t i = m; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < m; ++k) s -= a[i * m + k] * b[k];
    b[i] = s / a[i * m + i];
  }
}

}  // namespace rout::detail
