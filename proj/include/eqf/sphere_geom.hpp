#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "eqf/jet.hpp"
#include "eqf/tensor_core.hpp"

namespace eqf {

/// Unit vector of R^(n+1), viewed as a point of S^n.
class SpherePoint {
 public:
  /// Throws DomainError unless | |coords| - 1 | <= 1e-12.
  explicit SpherePoint(Vec coords);
  /// Normalizes any non-zero vector.
  static SpherePoint normalized(const Vec& v);

  int n() const { return static_cast<int>(coords_.size()) - 1; }
  const Vec& coords() const { return coords_; }

 private:
  Vec coords_;
};

/// Equator Sigma_v = { x in S^n : <x, v> = 0 }, keyed by its unit normal with
/// the first non-zero coordinate made positive (Sigma_v = Sigma_{-v}).
class Equator {
 public:
  explicit Equator(const Vec& normal);

  int n() const { return static_cast<int>(normal_.size()) - 1; }
  const Vec& normal() const { return normal_; }

  /// Orthonormal basis of v^perp, the linear span of the equator.
  const Mat& span() const { return span_; }

 private:
  Vec normal_;
  Mat span_;
};

/// Orthonormal basis of T_p S^n as the columns of an (n+1) x n matrix.
/// Gram-Schmidt on the standard basis with the coordinate most aligned with p
/// dropped (ties to the lowest index).
Mat tangent_frame(const Vec& p);

/// Central projection chart from the open hemisphere around `center`:
/// x in R^n -> (center + sum x_i e_i) / sqrt(1 + |x|^2).
class GnomonicChart {
 public:
  static constexpr double kMaxRadius = 10.0;

  explicit GnomonicChart(const SpherePoint& center);
  GnomonicChart(const SpherePoint& center, Mat frame);

  int n() const { return center_.n(); }
  const Vec& center() const { return center_.coords(); }
  const Mat& frame() const { return frame_; }

  /// Throws DomainError when |x| >= kMaxRadius.
  Vec point(const Vec& x) const;
  /// Inverse of point() on the open hemisphere.
  Vec coordinates(const Vec& p) const;

 private:
  SpherePoint center_;
  Mat frame_;
};

/// Chart point p(x) with every coordinate carried as a second-order jet in
/// the n chart variables.
std::vector<Jet> point_jet(const GnomonicChart& chart, const Vec& x);

/// Jets of the coordinate vectors d p / d x_i (outer index i).
std::vector<std::vector<Jet>> coordinate_vector_jets(const GnomonicChart& chart, const Vec& x);

/// cos t p + sin t u and its velocity. Throws DomainError unless u is a unit
/// tangent vector at p (residuals <= 1e-10).
std::pair<Vec, Vec> great_circle(const Vec& p, const Vec& u, double t);

/// phi(T)(p) = Tp / |Tp|.
Vec phi_T(const GroupElement& t, const Vec& p);

/// Differential of phi(T) at p applied to a tangent vector w.
Vec dphi_T(const GroupElement& t, const Vec& p, const Vec& w);

/// delta(T)(p) = |det T|^(4/(n+1)) / |Tp|^4, the density with
/// phi(T)^* dV = delta^((n+1)/4) dV.
double jacobian_density(const GroupElement& t, const Vec& p);

/// Nodes and positive weights approximating a round-measure integral.
///
/// Deterministic rules are exact for spherical polynomials up to
/// `exact_degree`. Monte Carlo rules set `monte_carlo` and carry no degree.
struct QuadratureRule {
  std::vector<Vec> nodes;
  std::vector<double> weights;
  bool monte_carlo = false;
  int exact_degree = -1;
  double reference_measure = 0.0;

  /// Product-rule structure when available (n = 3 equators): node index is
  /// polar * azimuthal_count + azimuthal, with the local spherical angles.
  int polar_count = 0;
  int azimuthal_count = 0;
  std::vector<double> polar_angles;
  std::vector<double> azimuthal_angles;
  Mat span;  // orthonormal basis whose coordinates the angles refer to
};

struct Integral {
  double value = 0.0;
  double standard_error = 0.0;  // zero for deterministic rules
};

/// Weighted sum of f over the nodes. Uses compensated summation.
Integral integrate(const QuadratureRule& rule, const std::function<double(const Vec&)>& f);

/// Round volume of the unit k-sphere.
double sphere_volume(int k);

/// Rule on the equator Sigma_v. Deterministic for n = 2 (trapezoid on the great
/// circle) and n = 3 (Gauss-Legendre x trapezoid on the 2-sphere); otherwise
/// antithetic Monte Carlo with `order`^2 samples.
QuadratureRule equator_quadrature(const Equator& v, int order, std::uint64_t seed = 1);

/// Rule on S^n. Deterministic for n = 2 and n = 3; Monte Carlo otherwise.
QuadratureRule sphere_quadrature(int n, int order, std::uint64_t seed = 1);

/// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count);

/// CSV rows "x0,...,xn,weight" with full round-trip precision.
std::string quadrature_csv(const QuadratureRule& rule);

}  // namespace eqf
