#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace eqf {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class GroupElement;

/// Max-norm violations of the four algebraic curvature symmetries.
struct SymmetryResiduals {
  double antisym_first = 0.0;   // R_ijkl + R_jikl
  double antisym_second = 0.0;  // R_ijkl + R_ijlk
  double pair = 0.0;            // R_ijkl - R_klij
  double bianchi = 0.0;         // R_ijkl + R_iklj + R_iljk

  double max() const;
};

/// Symmetry residuals of a raw (n+1)^4 row-major coefficient array.
/// Throws DimensionError if the array size is not (n+1)^4.
SymmetryResiduals validate(int n, std::span<const double> coeffs);

/// Algebraic curvature tensor on R^(n+1), stored densely.
///
/// Entry (i,j,k,l) is R(e_i, e_j, e_k, e_l). Instances always satisfy the
/// curvature symmetries to 1e-12; the only public way to build one from raw
/// numbers is from_coeffs, which validates.
class CurvatureTensor {
 public:
  static constexpr double kSymmetryTolerance = 1e-12;

  static CurvatureTensor zero(int n);
  static CurvatureTensor from_coeffs(int n, std::vector<double> coeffs,
                                     double tolerance = kSymmetryTolerance);

  int n() const { return n_; }
  int dim() const { return n_ + 1; }
  std::span<const double> coeffs() const { return coeffs_; }

  double operator()(int i, int j, int k, int l) const {
    return coeffs_[index(i, j, k, l)];
  }

  /// R(x, y, z, w).
  double evaluate(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const;

  /// Matrix M with M(b,d) = R(p, e_b, p, e_d).
  Mat sandwich(const Vec& p) const;

  /// The covector R(., y, z, w).
  Vec contract_first(const Vec& y, const Vec& z, const Vec& w) const;

  CurvatureTensor& operator+=(const CurvatureTensor& other);
  CurvatureTensor& operator-=(const CurvatureTensor& other);
  CurvatureTensor& operator*=(double s);

  double max_abs() const;
  double max_abs_diff(const CurvatureTensor& other) const;
  double frobenius_dot(const CurvatureTensor& other) const;

 private:
  CurvatureTensor(int n, std::vector<double> coeffs)
      : n_(n), coeffs_(std::move(coeffs)) {}

  std::size_t index(int i, int j, int k, int l) const {
    const auto m = static_cast<std::size_t>(n_ + 1);
    return ((static_cast<std::size_t>(i) * m + static_cast<std::size_t>(j)) * m +
            static_cast<std::size_t>(k)) *
               m +
           static_cast<std::size_t>(l);
  }

  int n_ = 0;
  std::vector<double> coeffs_;

  friend CurvatureTensor project_algebraic(int n, std::span<const double> raw);
  friend CurvatureTensor act(const CurvatureTensor& r, const GroupElement& t);
};

inline CurvatureTensor operator+(CurvatureTensor a, const CurvatureTensor& b) {
  return a += b;
}
inline CurvatureTensor operator-(CurvatureTensor a, const CurvatureTensor& b) {
  return a -= b;
}
inline CurvatureTensor operator*(double s, CurvatureTensor a) { return a *= s; }

/// Invertible linear map of R^(n+1).
class GroupElement {
 public:
  explicit GroupElement(Mat matrix);

  static GroupElement identity(int n);

  int n() const { return static_cast<int>(matrix_.rows()) - 1; }
  const Mat& matrix() const { return matrix_; }
  double det() const { return det_; }

  GroupElement operator*(const GroupElement& other) const {
    return GroupElement(matrix_ * other.matrix_);
  }
  GroupElement inverse() const { return GroupElement(matrix_.inverse()); }

 private:
  Mat matrix_;
  double det_ = 1.0;
};

/// Element of so(n+1); also the Killing vector field p -> M p of the round sphere.
class SkewMatrix {
 public:
  explicit SkewMatrix(Mat matrix);

  /// The generator e_i e_j^T - e_j e_i^T.
  static SkewMatrix elementary(int n, int i, int j);

  int n() const { return static_cast<int>(matrix_.rows()) - 1; }
  const Mat& matrix() const { return matrix_; }

 private:
  Mat matrix_;
};

/// Project an arbitrary (n+1)^4 array onto Curv(R^(n+1)) by averaging over the
/// index symmetries and removing the totally antisymmetric (Bianchi) part.
CurvatureTensor project_algebraic(int n, std::span<const double> raw);

/// Orthonormal basis of Curv(R^(n+1)) in the Frobenius inner product.
///
/// Built once per n from projected elementary tensors, taken in lexicographic
/// index order and kept when linearly independent of those already accepted.
/// The count is (n+1)^2((n+1)^2 - 1)/12.
const std::vector<CurvatureTensor>& curv_basis(int n);

/// Expected dimension of Curv(R^(n+1)).
int curv_dimension(int n);

/// Coordinates of R in curv_basis(n).
Vec basis_coordinates(const CurvatureTensor& r);

/// Tensor with the given coordinates in curv_basis(n).
CurvatureTensor from_basis_coordinates(int n, const Vec& coords);

/// Least-squares projection of a raw array onto span(curv_basis(n)).
struct Projection {
  CurvatureTensor tensor;
  double residual = 0.0;  // max-norm of raw - tensor
};
Projection project_onto_basis(int n, std::span<const double> raw);

/// Sectional curvature of span{x, y}. Throws DomainError when the Gram
/// determinant is at most 1e-12.
double sectional(const CurvatureTensor& r, const Vec& x, const Vec& y);

struct ProbeOptions {
  int restarts = 12;
  int iters = 400;
  std::uint64_t seed = 1;
};

struct SectionalMinimum {
  double value = 0.0;
  Vec x;  // orthonormal pair spanning the minimizing plane
  Vec y;
};

/// Multi-start projected-gradient descent of the sectional curvature over
/// orthonormal pairs. Returns the best local minimum found.
SectionalMinimum sec_min_estimate(const CurvatureTensor& r, const ProbeOptions& opts = {});

struct PositivityProbe {
  bool positive = false;
  double min_value = 0.0;
  Vec x;  // witness plane
  Vec y;
};

/// Numerical probe (not a certificate) for sec >= margin.
PositivityProbe is_positive(const CurvatureTensor& r, double margin,
                            const ProbeOptions& opts = {});

/// c(<x,z><y,w> - <x,w><y,z>).
CurvatureTensor constant_curvature(int n, double c);

/// Complex structure on R^(2m+2) pairing coordinates (2a, 2a+1): J e_2a = e_2a+1.
Mat complex_structure(int dim);

/// Curvature tensor of CP^m on R^(2m+2); sphere dimension 2m+1.
CurvatureTensor fubini_study(int m);

/// (R.T)(x,y,z,w) = |det T|^(-4/(n+1)) R(Tx,Ty,Tz,Tw). A right action.
CurvatureTensor act(const CurvatureTensor& r, const GroupElement& t);

/// Unit-norm random element of Curv(R^(n+1)).
CurvatureTensor random_direction(int n, std::uint64_t seed);

struct RandomTensor {
  CurvatureTensor tensor;
  double eps = 0.0;     // perturbation size actually used
  double margin = 0.0;  // probe minimum of the result
};

/// round + eps * (random unit direction). If the probe reports a minimum below
/// `margin`, eps is reduced by bisection until it does not.
RandomTensor random_positive(int n, std::uint64_t seed, double eps, double margin = 0.1);

}  // namespace eqf
