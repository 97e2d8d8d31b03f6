#include "eqf/analysis.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "eqf/errors.hpp"
#include "eqf/parallel.hpp"
#include "eqf/verification.hpp"

namespace eqf {

namespace {

// Orthonormal basis of T_x Sigma_v inside the span of the equator.
Mat equator_tangent(const Equator& v, const Vec& x) {
  const Mat& span = v.span();
  const Vec y = span.transpose() * x;
  return span * tangent_frame(y);
}

// Round-orthonormal (e_theta, e_phi) at the product-rule node with angles
// (theta, phi) in the equator's span coordinates.
Mat angular_frame(const Mat& span, double theta, double phi) {
  Mat e(span.rows(), 2);
  e.col(0) = std::cos(theta) * std::cos(phi) * span.col(0) +
             std::cos(theta) * std::sin(phi) * span.col(1) - std::sin(theta) * span.col(2);
  e.col(1) = -std::sin(phi) * span.col(0) + std::cos(phi) * span.col(1);
  return e;
}

double sqrt_det(const Mat& m) {
  const double det = m.determinant();
  if (!(det > 0.0)) throw PositivityError("induced metric is not positive definite");
  return std::sqrt(det);
}

}  // namespace

int harmonic_count(int max_degree) { return (max_degree + 1) * (max_degree + 1); }

HarmonicTable spherical_harmonics(int max_degree, const std::vector<double>& theta,
                                  const std::vector<double>& phi) {
  if (max_degree < 0) throw DomainError("harmonic degree must be non-negative");
  if (theta.size() != phi.size()) throw DimensionError("angle arrays differ in length");
  const auto rows = static_cast<Eigen::Index>(theta.size());
  const int cols = harmonic_count(max_degree);
  HarmonicTable t{Mat(rows, cols), Mat(rows, cols), Mat(rows, cols), {}};
  for (int l = 0; l <= max_degree; ++l) {
    t.degree.push_back(l);
    for (int m = 1; m <= l; ++m) {
      t.degree.push_back(l);
      t.degree.push_back(l);
    }
  }
  const double root2 = std::sqrt(2.0);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double th = theta[static_cast<std::size_t>(r)];
    const double ph = phi[static_cast<std::size_t>(r)];
    const double x = std::cos(th);
    const double s = std::sin(th);
    if (!(s > 0.0)) throw DomainError("harmonic table needs points off the poles");
    int col = 0;
    for (int l = 0; l <= max_degree; ++l) {
      for (int m = 0; m <= l; ++m) {
        const auto ul = static_cast<unsigned>(l);
        const auto um = static_cast<unsigned>(m);
        // std::sph_legendre is the orthonormal associated Legendre function
        const double p = std::sph_legendre(ul, um, th);
        const double prev = l - 1 >= m ? std::sph_legendre(ul - 1, um, th) : 0.0;
        const double c = std::sqrt((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0));
        const double dp = l == 0 ? 0.0 : (l * x * p - c * prev) / s;
        if (m == 0) {
          t.value(r, col) = p;
          t.d_theta(r, col) = dp;
          t.d_phi_over_sin(r, col) = 0.0;
          ++col;
          continue;
        }
        const double cm = std::cos(m * ph);
        const double sm = std::sin(m * ph);
        t.value(r, col) = root2 * p * cm;
        t.d_theta(r, col) = root2 * dp * cm;
        t.d_phi_over_sin(r, col) = -root2 * m * p * sm / s;
        ++col;
        t.value(r, col) = root2 * p * sm;
        t.d_theta(r, col) = root2 * dp * sm;
        t.d_phi_over_sin(r, col) = root2 * m * p * cm / s;
        ++col;
      }
    }
  }
  return t;
}

EquatorMesh equator_mesh(const MetricField& g, const Equator& v, int order, std::uint64_t seed) {
  if (v.n() != g.n()) throw DimensionError("equator and metric dimensions differ");
  EquatorMesh mesh{v, equator_quadrature(v, order, seed), {}, {}, {}};
  const QuadratureRule& rule = mesh.rule;
  const std::size_t count = rule.nodes.size();
  mesh.tangent.resize(count);
  mesh.induced.resize(count);
  mesh.area_element.resize(count);
  const bool product = rule.polar_count > 0;
  parallel_for(static_cast<int>(count), [&](int k) {
    const auto uk = static_cast<std::size_t>(k);
    const Vec& x = rule.nodes[uk];
    Mat tangent;
    if (product) {
      const auto i = static_cast<std::size_t>(k / rule.azimuthal_count);
      const auto a = static_cast<std::size_t>(k % rule.azimuthal_count);
      tangent = angular_frame(rule.span, rule.polar_angles[i], rule.azimuthal_angles[a]);
    } else {
      tangent = equator_tangent(v, x);
    }
    mesh.induced[uk] = g.in_frame(x, tangent);
    mesh.area_element[uk] = sqrt_det(mesh.induced[uk]);
    mesh.tangent[uk] = std::move(tangent);
  });
  return mesh;
}

Integral funk_radon(const EquatorMesh& mesh, const std::function<double(const Vec&)>& f) {
  // fold the area element into the weights so f = 1 reproduces the area exactly
  QuadratureRule weighted = mesh.rule;
  for (std::size_t k = 0; k < weighted.weights.size(); ++k) {
    weighted.weights[k] *= mesh.area_element[k];
  }
  return integrate(weighted, f);
}

Integral funk_radon(const MetricField& g, const std::function<double(const Vec&)>& f,
                    const Equator& v, int order, std::uint64_t seed) {
  return funk_radon(equator_mesh(g, v, order, seed), f);
}

Integral equator_area(const MetricField& g, const Equator& v, int order, std::uint64_t seed) {
  return funk_radon(equator_mesh(g, v, order, seed), [](const Vec&) { return 1.0; });
}

double SecondFundamentalForm::mean_curvature() const {
  return induced.inverse().cwiseProduct(form).sum();
}

double SecondFundamentalForm::norm2() const {
  const Mat inv = induced.inverse();
  return (inv * form * inv * form).trace();
}

SecondFundamentalForm second_fundamental_form(const MetricField& g, const Equator& v, const Vec& p) {
  if (std::abs(p.dot(v.normal())) > 1e-10) throw DomainError("point is not on the equator");
  const int n = g.n();
  SecondFundamentalForm out;
  out.frame = equator_tangent(v, p);
  Mat frame(n + 1, n);
  frame << out.frame, v.normal();
  const GnomonicChart chart(SpherePoint(p), frame);
  const HeightDerivatives h = height_derivatives(g, v.normal(), chart);
  out.form = h.hessian.topLeftCorner(n - 1, n - 1) / h.gradient_norm;
  out.induced = g.in_frame(p, out.frame);
  return out;
}

namespace {

EquatorMesh jacobi_mesh(const MetricField& g, const Equator& v, int max_degree, int order) {
  if (g.n() != 3) throw DimensionError("the Jacobi probe is implemented for n = 3");
  if (max_degree < 0) throw DomainError("harmonic degree must be non-negative");
  if (order <= 0) order = std::max(32, 2 * max_degree + 8);
  return equator_mesh(g, v, order);
}

}  // namespace

JacobiGalerkin::JacobiGalerkin(const MetricField& g, const Equator& v, int max_degree, int order)
    : max_degree_(max_degree), metric_(g), mesh_(jacobi_mesh(g, v, max_degree, order)) {
  const QuadratureRule& rule = mesh_.rule;
  const std::size_t count = rule.nodes.size();

  std::vector<double> theta(count);
  std::vector<double> phi(count);
  for (std::size_t k = 0; k < count; ++k) {
    theta[k] = rule.polar_angles[k / static_cast<std::size_t>(rule.azimuthal_count)];
    phi[k] = rule.azimuthal_angles[k % static_cast<std::size_t>(rule.azimuthal_count)];
  }
  basis_ = spherical_harmonics(max_degree, theta, phi);

  potential_.resize(count);
  normal_.resize(count);
  inv_induced_.resize(count);
  parallel_for(static_cast<int>(count), [&](int ik) {
    const auto k = static_cast<std::size_t>(ik);
    const Vec& x = rule.nodes[k];
    Mat frame(4, 3);
    frame << mesh_.tangent[k], v.normal();
    const GnomonicChart chart(SpherePoint(x), frame);
    const HeightDerivatives h = height_derivatives(g, v.normal(), chart);
    const CurvatureData curv = curvature_of_metric(g, chart, Vec::Zero(3));
    const Vec nrm = h.normal();
    const Mat& gamma = mesh_.induced[k];
    const Mat a = h.hessian.topLeftCorner(2, 2) / h.gradient_norm;
    const Mat inv = gamma.inverse();
    potential_[k] = nrm.dot(curv.ricci * nrm) + (inv * a * inv * a).trace();
    normal_[k] = frame * nrm;
    inv_induced_[k] = inv;
  });

  Vec w(static_cast<Eigen::Index>(count));
  Vec w00(w.size());
  Vec w01(w.size());
  Vec w11(w.size());
  Vec wq(w.size());
  for (std::size_t k = 0; k < count; ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    w[i] = rule.weights[k] * mesh_.area_element[k];
    w00[i] = w[i] * inv_induced_[k](0, 0);
    w01[i] = w[i] * inv_induced_[k](0, 1);
    w11[i] = w[i] * inv_induced_[k](1, 1);
    wq[i] = w[i] * potential_[k];
  }
  const Mat& y = basis_.value;
  const Mat& dt = basis_.d_theta;
  const Mat& dp = basis_.d_phi_over_sin;
  mass_ = y.transpose() * w.asDiagonal() * y;
  const Mat cross = dt.transpose() * w01.asDiagonal() * dp;
  stiffness_ = dt.transpose() * w00.asDiagonal() * dt + cross + cross.transpose() +
               dp.transpose() * w11.asDiagonal() * dp - y.transpose() * wq.asDiagonal() * y;
  mass_ = 0.5 * (mass_ + mass_.transpose()).eval();
  stiffness_ = 0.5 * (stiffness_ + stiffness_.transpose()).eval();
}

Vec JacobiGalerkin::eigenvalues() const {
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> solver(stiffness_, mass_, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw PositivityError("Galerkin mass matrix is not positive definite");
  }
  return solver.eigenvalues();
}

Vec JacobiGalerkin::project(const std::vector<double>& values) const {
  const QuadratureRule& rule = mesh_.rule;
  if (values.size() != rule.nodes.size()) throw DimensionError("one value per node expected");
  Vec rhs = Vec::Zero(size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double w = rule.weights[k] * mesh_.area_element[k] * values[k];
    rhs += w * basis_.value.row(static_cast<Eigen::Index>(k)).transpose();
  }
  return mass_.ldlt().solve(rhs);
}

std::vector<double> JacobiGalerkin::evaluate(const Vec& coeffs) const {
  if (coeffs.size() > size()) throw DomainError("coefficients exceed the harmonic basis");
  Vec full = Vec::Zero(size());
  full.head(coeffs.size()) = coeffs;
  const Vec values = basis_.value * full;
  return std::vector<double>(values.data(), values.data() + values.size());
}

std::vector<double> JacobiGalerkin::apply(const Vec& coeffs) const {
  if (coeffs.size() > size()) throw DomainError("coefficients exceed the harmonic basis");
  Vec full = Vec::Zero(size());
  full.head(coeffs.size()) = coeffs;
  return evaluate(mass_.ldlt().solve(-(stiffness_ * full)));
}

std::vector<double> JacobiGalerkin::apply(const std::function<double(const Vec&)>& eta,
                                          double h) const {
  const QuadratureRule& rule = mesh_.rule;
  const std::size_t count = rule.nodes.size();
  std::vector<Vec> grad(count, Vec::Zero(2));
  std::vector<double> values(count);
  parallel_for(static_cast<int>(count), [&](int ik) {
    const auto k = static_cast<std::size_t>(ik);
    const Vec& x = rule.nodes[k];
    values[k] = eta(x);
    for (int a = 0; a < 2; ++a) {
      const Vec u = mesh_.tangent[k].col(a);
      const double plus = eta(great_circle(x, u, h).first);
      const double minus = eta(great_circle(x, u, -h).first);
      grad[k][a] = (plus - minus) / (2.0 * h);
    }
  });
  // b_i = -int (gamma(grad eta, grad Y_i) - q eta Y_i) dA_g
  Vec rhs = Vec::Zero(size());
  for (std::size_t k = 0; k < count; ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    const double w = rule.weights[k] * mesh_.area_element[k];
    const Vec up = inv_induced_[k] * grad[k];
    rhs -= w * (up[0] * basis_.d_theta.row(r).transpose() +
                up[1] * basis_.d_phi_over_sin.row(r).transpose() -
                potential_[k] * values[k] * basis_.value.row(r).transpose());
  }
  return evaluate(mass_.ldlt().solve(rhs));
}

std::function<double(const Vec&)> rotation_jacobi_function(const MetricField& g, const Equator& v,
                                                           const Vec& w) {
  const Vec normal = v.normal();
  const Mat k = w * normal.transpose() - normal * w.transpose();
  return [g, normal, k](const Vec& x) {
    const HeightDerivatives h = height_derivatives(g, normal, x);
    return g(x, k * x, h.frame * h.normal());
  };
}

std::vector<std::vector<double>> JacobiGalerkin::rotation_jacobi_functions() const {
  const QuadratureRule& rule = mesh_.rule;
  const Vec& v = mesh_.equator.normal();
  std::vector<std::vector<double>> out;
  for (Eigen::Index c = 0; c < rule.span.cols(); ++c) {
    const Vec w = rule.span.col(c);
    const Mat k = w * v.transpose() - v * w.transpose();
    std::vector<double> values(rule.nodes.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const Vec& x = rule.nodes[i];
      values[i] = metric_(x, k * x, normal_[i]);
    }
    out.push_back(std::move(values));
  }
  return out;
}

std::vector<double> jacobi_apply(const MetricField& g, const Equator& v, const Vec& coeffs,
                                 int max_degree) {
  if (coeffs.size() > harmonic_count(max_degree)) {
    throw DomainError("coefficients exceed the harmonic basis");
  }
  return JacobiGalerkin(g, v, max_degree).apply(coeffs);
}

SpectrumProbe jacobi_spectrum_probe(const MetricField& g, const Equator& v, int max_degree,
                                    double nullity_tolerance, int order) {
  SpectrumProbe out;
  out.eigenvalues = JacobiGalerkin(g, v, max_degree, order).eigenvalues();
  for (const double lambda : out.eigenvalues) {
    if (lambda < -nullity_tolerance) ++out.negative;
    if (std::abs(lambda) <= nullity_tolerance) ++out.near_zero;
  }
  return out;
}

Mat quaternion_left(int unit) {
  Mat l = Mat::Zero(4, 4);
  switch (unit) {
    case 1:  // i (a + bi + cj + dk) = -b + ai - dj + ck
      l(0, 1) = -1; l(1, 0) = 1; l(2, 3) = -1; l(3, 2) = 1;
      break;
    case 2:  // j q = -c + di + aj - bk
      l(0, 2) = -1; l(1, 3) = 1; l(2, 0) = 1; l(3, 1) = -1;
      break;
    case 3:  // k q = -d - ci + bj + ak
      l(0, 3) = -1; l(1, 2) = -1; l(2, 1) = 1; l(3, 0) = 1;
      break;
    default:
      throw DomainError("quaternion unit must be 1, 2 or 3");
  }
  return l;
}

MetricField left_invariant_metric(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw DomainError("left-invariant parameters must be positive");
  std::ostringstream tag;
  tag << std::setprecision(17) << "left-invariant(" << a << "," << b << "," << c << ")";
  // (L p)(L p)^T is half of L (.) L, so the coefficients are the frame values
  MetricField g = quadratic_metric(
      3, {{a, quaternion_left(1)}, {b, quaternion_left(2)}, {c, quaternion_left(3)}}, tag.str());
  const MetricKilling k = killing_from_metric(g, ConstancyOptions{4, 8, 1, {}});
  return g.with_generator(curv_from_killing(k.field).tensor);
}

std::string area_csv(const std::vector<Equator>& equators, const std::vector<double>& areas) {
  if (equators.size() != areas.size()) throw DimensionError("one area per equator expected");
  std::ostringstream out;
  out << std::setprecision(17);
  if (!equators.empty()) {
    for (Eigen::Index i = 0; i < equators.front().normal().size(); ++i) out << 'v' << i << ',';
    out << "area\n";
  }
  for (std::size_t k = 0; k < equators.size(); ++k) {
    for (Eigen::Index i = 0; i < equators[k].normal().size(); ++i) out << equators[k].normal()[i] << ',';
    out << areas[k] << '\n';
  }
  return out.str();
}

std::string spectrum_csv(const Vec& eigenvalues) {
  std::ostringstream out;
  out << std::setprecision(17) << "k,eigenvalue\n";
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) out << k << ',' << eigenvalues[k] << '\n';
  return out.str();
}

}  // namespace eqf
