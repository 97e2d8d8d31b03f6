#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "eqf/correspondence.hpp"
#include "eqf/sphere_geom.hpp"

namespace eqf {

/// Real orthonormal spherical harmonics on the unit 2-sphere, degree <= L,
/// ordered by degree l and within it Y_l0, then (cos m phi, sin m phi) pairs
/// for m = 1..l.
struct HarmonicTable {
  Mat value;             // rows: points, columns: basis functions
  Mat d_theta;           // dY / d theta
  Mat d_phi_over_sin;    // (dY / d phi) / sin theta
  std::vector<int> degree;
};

int harmonic_count(int max_degree);
HarmonicTable spherical_harmonics(int max_degree, const std::vector<double>& theta,
                                  const std::vector<double>& phi);

/// Quadrature on Sigma_v with the induced metric of g sampled at the nodes.
struct EquatorMesh {
  Equator equator;
  QuadratureRule rule;
  std::vector<Mat> tangent;           // orthonormal (round) basis of T_x Sigma_v, ambient columns
  std::vector<Mat> induced;           // g restricted to that basis
  std::vector<double> area_element;   // sqrt(det induced) = dA_g / dA_round
};

EquatorMesh equator_mesh(const MetricField& g, const Equator& v, int order, std::uint64_t seed = 1);

/// Area of Sigma_v under g. Deterministic for n = 2, 3.
Integral equator_area(const MetricField& g, const Equator& v, int order, std::uint64_t seed = 1);

/// Integral of f over Sigma_v against the induced area element of g.
Integral funk_radon(const MetricField& g, const std::function<double(const Vec&)>& f,
                    const Equator& v, int order, std::uint64_t seed = 1);
Integral funk_radon(const EquatorMesh& mesh, const std::function<double(const Vec&)>& f);

struct SecondFundamentalForm {
  Mat frame;    // round-orthonormal basis of T_p Sigma_v, ambient columns
  Mat form;     // A(e_a, e_b) = Hess_g V(e_a, e_b) / |grad V|_g
  Mat induced;  // g(e_a, e_b)
  double mean_curvature() const;  // tr_g A
  double norm2() const;           // |A|_g^2
};

SecondFundamentalForm second_fundamental_form(const MetricField& g, const Equator& v, const Vec& p);

/// Galerkin discretization of the Jacobi operator
/// J eta = Delta eta + (Ric(N, N) + |A|^2) eta on Sigma_v (n = 3) in the
/// round spherical harmonics of degree <= L.
///
/// stiffness() is the quadratic form of -J, mass() the L^2(dA_g) Gram matrix.
class JacobiGalerkin {
 public:
  /// order <= 0 picks max(32, 2L + 8).
  JacobiGalerkin(const MetricField& g, const Equator& v, int max_degree, int order = 0);

  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(stiffness_.rows()); }
  const EquatorMesh& mesh() const { return mesh_; }
  const Mat& stiffness() const { return stiffness_; }
  const Mat& mass() const { return mass_; }
  /// Potential Ric(N, N) + |A|^2 at the nodes.
  const std::vector<double>& potential() const { return potential_; }

  /// Generalized eigenvalues of (stiffness, mass), ascending.
  Vec eigenvalues() const;

  /// L^2(dA_g) projection of nodal values onto the basis.
  Vec project(const std::vector<double>& values) const;
  /// Nodal values of the expansion with the given coefficients.
  std::vector<double> evaluate(const Vec& coeffs) const;
  /// Nodal values of J eta for eta with the given coefficients.
  std::vector<double> apply(const Vec& coeffs) const;
  /// Nodal values of the Galerkin projection of J eta for a function eta on
  /// Sigma_v, from the weak form with eta evaluated exactly and its gradient
  /// by central differences of step h along great circles in Sigma_v.
  std::vector<double> apply(const std::function<double(const Vec&)>& eta, double h = 1e-4) const;

  /// eta_w = g(K_w x, N) with K_w = w v^T - v w^T for the three basis vectors
  /// w of v^perp: the rotations that move Sigma_v. Nodal values.
  std::vector<std::vector<double>> rotation_jacobi_functions() const;

 private:
  int max_degree_;
  MetricField metric_;
  EquatorMesh mesh_;
  HarmonicTable basis_;
  std::vector<double> potential_;
  std::vector<Vec> normal_;  // ambient unit normal N^g at the nodes
  std::vector<Mat> inv_induced_;
  Mat stiffness_;
  Mat mass_;
};

/// x -> g(K_w x, N(x)) on Sigma_v with K_w = w v^T - v w^T, w orthogonal to v.
std::function<double(const Vec&)> rotation_jacobi_function(const MetricField& g, const Equator& v,
                                                           const Vec& w);

/// Nodal values of J eta for eta given by harmonic coefficients.
/// Throws DomainError when coeffs has more entries than the degree-L basis.
std::vector<double> jacobi_apply(const MetricField& g, const Equator& v, const Vec& coeffs,
                                 int max_degree);

struct SpectrumProbe {
  Vec eigenvalues;
  int negative = 0;   // eigenvalues below -nullity_tolerance
  int near_zero = 0;  // |lambda| <= nullity_tolerance
};

SpectrumProbe jacobi_spectrum_probe(const MetricField& g, const Equator& v, int max_degree,
                                    double nullity_tolerance = 1e-3, int order = 0);

/// Left multiplication by i, j, k (unit = 1, 2, 3) on R^4 = H with
/// (a, b, c, d) = a + b i + c j + d k.
Mat quaternion_left(int unit);

/// g = a L_i (.) L_i + b L_j (.) L_j + c L_k (.) L_k on S^3, normalized so
/// that the frame (ip, jp, kp) has diagonal (a, b, c). The generator of the
/// returned field is the curvature tensor of k_g = g / F_g.
MetricField left_invariant_metric(double a, double b, double c);

/// CSV with header "v0,...,vn,area".
std::string area_csv(const std::vector<Equator>& equators, const std::vector<double>& areas);

/// CSV with header "k,eigenvalue".
std::string spectrum_csv(const Vec& eigenvalues);

}  // namespace eqf
