#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "eqf/jet.hpp"

namespace eqf {

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

/// Determinant of a row-major m x m matrix by Gaussian elimination with
/// partial pivoting on the values. Works for double and Jet entries.
template <class T>
T determinant(std::vector<T> a, int m) {
  const auto at = [m](int i, int j) { return static_cast<std::size_t>(i * m + j); };
  T det = a[0] * 0.0 + 1.0;
  for (int c = 0; c < m; ++c) {
    int pivot = c;
    for (int r = c + 1; r < m; ++r) {
      if (std::abs(value_of(a[at(r, c)])) > std::abs(value_of(a[at(pivot, c)]))) pivot = r;
    }
    if (pivot != c) {
      for (int j = 0; j < m; ++j) std::swap(a[at(c, j)], a[at(pivot, j)]);
      det = -det;
    }
    const T piv = a[at(c, c)];
    if (value_of(piv) == 0.0) return piv;
    det = det * piv;
    const T inv = 1.0 / piv;
    for (int r = c + 1; r < m; ++r) {
      const T factor = a[at(r, c)] * inv;
      for (int j = c + 1; j < m; ++j) a[at(r, j)] -= factor * a[at(c, j)];
    }
  }
  return det;
}

}  // namespace eqf
