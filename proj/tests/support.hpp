#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "eqf/random.hpp"
#include "eqf/sphere_geom.hpp"
#include "eqf/tensor_core.hpp"

namespace eqf::test {

inline Mat random_invertible(int dim, Rng& rng, double scale = 0.3) {
  for (;;) {
    Mat t = Mat::Identity(dim, dim);
    for (int i = 0; i < dim; ++i) {
      for (int j = 0; j < dim; ++j) t(i, j) += scale * rng.normal();
    }
    if (std::abs(t.determinant()) > 0.1) return t;
  }
}

inline Mat random_orthogonal(int dim, Rng& rng) {
  Mat a(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) a(i, j) = rng.normal();
  }
  Eigen::HouseholderQR<Mat> qr(a);
  return qr.householderQ();
}

inline Vec random_tangent(const Vec& p, Rng& rng) {
  Vec w = rng.gaussian(static_cast<int>(p.size()));
  w -= w.dot(p) * p;
  return w.normalized();
}

/// Minimum of R(x,y,x,y) / |x ^ y|^2 over random Gaussian planes.
inline double brute_force_min_sectional(const CurvatureTensor& r, int planes, std::uint64_t seed) {
  Rng rng(seed);
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < planes; ++s) {
    const Vec x = rng.gaussian(r.dim());
    const Vec y = rng.gaussian(r.dim());
    const double gram = x.squaredNorm() * y.squaredNorm() - std::pow(x.dot(y), 2);
    best = std::min(best, r.evaluate(x, y, x, y) / gram);
  }
  return best;
}

/// Central difference of a matrix-valued function of one variable.
inline Mat central_difference(const std::function<Mat(double)>& f, double h) {
  return (f(h) - f(-h)) / (2 * h);
}

}  // namespace eqf::test
