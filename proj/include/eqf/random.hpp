#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace eqf {

/// Seeded random stream used by every sampling routine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  Eigen::VectorXd gaussian(int size) {
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = normal();
    return v;
  }

  /// Uniform point on the unit sphere of R^dim.
  Eigen::VectorXd unit(int dim) {
    Eigen::VectorXd v = gaussian(dim);
    while (v.norm() < 1e-8) v = gaussian(dim);
    return v / v.norm();
  }

  /// Uniform unit vector orthogonal to the (orthonormal) columns of `span`.
  Eigen::VectorXd unit_orthogonal(const Eigen::MatrixXd& span) {
    for (;;) {
      Eigen::VectorXd v = gaussian(static_cast<int>(span.rows()));
      for (int pass = 0; pass < 2; ++pass) {
        for (int c = 0; c < span.cols(); ++c) {
          const Eigen::VectorXd u = span.col(c);
          v -= v.dot(u) * u;
        }
      }
      if (v.norm() > 1e-6) return v / v.norm();
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace eqf
