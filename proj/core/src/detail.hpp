#pragma once

#include <cmath>
#include <utility>

namespace sgflow::detail {

/// Determinant of a k x k row-major matrix by partial-pivot elimination
/// (destroys `m`).
inline double small_det(double* m, int k) {
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r)
      if (std::abs(m[r * k + c]) > std::abs(m[piv * k + c])) piv = r;
    if (m[piv * k + c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(m[c * k + j], m[piv * k + j]);
      det = -det;
    }
    det *= m[c * k + c];
    for (int r = c + 1; r < k; ++r) {
      const double f = m[r * k + c] / m[c * k + c];
      for (int j = c + 1; j < k; ++j) m[r * k + j] -= f * m[c * k + j];
    }
  }
  return det;
}

}  // namespace sgflow::detail
