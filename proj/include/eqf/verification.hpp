#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "eqf/correspondence.hpp"
#include "eqf/sphere_geom.hpp"
#include "eqf/tensor_core.hpp"

namespace eqf {

/// Levi-Civita connection of g in a gnomonic chart.
struct ChristoffelData {
  MetricJet metric;
  Mat ginv;
  std::vector<Mat> gamma;  // gamma[k](i, j) = Gamma^k_ij

  int n() const { return static_cast<int>(ginv.rows()); }
  double operator()(int k, int i, int j) const {
    return gamma[static_cast<std::size_t>(k)](i, j);
  }
};

/// Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij). Throws DomainError
/// when g is singular at x.
ChristoffelData christoffels(const MetricField& g, const GnomonicChart& chart, const Vec& x);

/// Derivatives of the height function V(x) = <x, v> at a chart center.
/// Components are in the chart frame (the coordinate basis at the center).
struct HeightDerivatives {
  Mat frame;          // chart frame at p
  Vec differential;   // dV(e_i)
  Vec gradient;       // g-gradient, frame components
  Mat hessian;        // Hess_g V(e_i, e_j)
  double laplacian = 0.0;
  double gradient_norm = 0.0;  // |grad V|_g

  /// Unit normal N = grad / |grad|, frame components.
  Vec normal() const { return gradient / gradient_norm; }
  Vec ambient_gradient() const { return frame * gradient; }
};

HeightDerivatives height_derivatives(const MetricField& g, const Vec& v, const Vec& p);
HeightDerivatives height_derivatives(const MetricField& g, const Vec& v, const GnomonicChart& chart);

/// Mean curvature (1/|grad V|)(Delta V - Hess V(N, N)) of Sigma_v at p.
/// Throws DomainError unless |<p, v>| <= 1e-10.
double mean_curvature_equator(const MetricField& g, const Equator& v, const Vec& p);

/// T(X, Y, Z) = g(nabla^g_X Y - nabla^round_X Y, Z) as an n^3 array
/// indexed ((i * n) + j) * n + k in chart coordinates.
struct FundamentalTensor {
  int n = 0;
  std::vector<double> t;

  double operator()(int i, int j, int k) const {
    return t[static_cast<std::size_t>((i * n + j) * n + k)];
  }
  double operator()(const Vec& x, const Vec& y, const Vec& z) const;
};

FundamentalTensor fundamental_tensor(const MetricField& g, const GnomonicChart& chart, const Vec& x);

/// T_g(X, Y, Z) for chart-coordinate vectors X, Y, Z.
double fundamental_tensor(const MetricField& g, const GnomonicChart& chart, const Vec& x,
                          const Vec& X, const Vec& Y, const Vec& Z);

/// d log psi in chart coordinates, psi = sqrt(det g / det round).
Vec dlog_psi(const MetricField& g, const GnomonicChart& chart, const Vec& x);

/// Max-norm of (nabla^round g - 4/(n+1) dlog psi (x) g)^S in chart coordinates.
double metric_equation_residual(const MetricField& g, const GnomonicChart& chart, const Vec& x);

/// Max-norm of (T_g - g (x) tr^12_g T_g)^S, the equivalent trace formulation.
double trace_equation_residual(const MetricField& g, const GnomonicChart& chart, const Vec& x);

/// Curvature of g at a chart point: lowered Riemann tensor with
/// Rm(X, Y, Z, W) = g(R(X, Y) W, Z), Ricci, scalar.
struct CurvatureData {
  int n = 0;
  std::vector<double> riemann;
  Mat ricci;
  double scalar = 0.0;
  double bianchi_residual = 0.0;

  double operator()(int i, int j, int k, int l) const {
    return riemann[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)];
  }
};

CurvatureData curvature_of_metric(const MetricField& g, const GnomonicChart& chart, const Vec& x);

/// Basic identities of the fundamental tensor at p on Sigma_v, each as a
/// max-norm residual in the chart frame at p.
struct FundamentalChecks {
  double symmetry = 0.0;        // T(X,Y,Z) - T(Y,X,Z)
  double symmetrization = 0.0;  // T^S - 1/2 (nabla^round g)^S
  double trace = 0.0;           // tr^23_g T - dlog psi
  double normal = 0.0;          // T(X, Y, grad V) + Hess V(X, Y)
};

FundamentalChecks fundamental_checks(const MetricField& g, const Equator& v, const Vec& p);

/// max |Hess V + V g| for the round metric at p (any v).
double obata_residual(const Vec& v, const Vec& p);

/// Max over samples of |phi(T)^* g_R - g_{R.T}| in orthonormal frames.
double equivariance_residual(const CurvatureTensor& r, const GroupElement& t, int samples,
                             std::uint64_t seed);

/// Max over samples of |g(-p) - g(p)| (frames mapped by the antipodal map).
double antipodal_residual(const MetricField& g, int samples, std::uint64_t seed);

/// Max-norm of R.T - R.
double stabilizer_residual(const CurvatureTensor& r, const GroupElement& t);

/// Points of Sigma_v along great circles through a fixed point q of Sigma_v
/// (the normalized projection of `focus`). Every other point is drawn within
/// `near_radius` of q, the rest anywhere on the circle.
std::vector<Vec> equator_samples(const Equator& v, int count, std::uint64_t seed,
                                 const Vec& focus = Vec(), double near_radius = 0.3);

struct CheckResult {
  double residual = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  bool pass() const { return residual <= tolerance; }
};

struct VerificationReport {
  std::map<std::string, CheckResult> checks;
  std::uint64_t seed = 0;

  bool pass() const;
  /// {"version":..., "seed":..., "checks": {name: {residual, tolerance, samples, seed, pass}}}
  std::string to_json() const;
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int equators = 50;
  int points = 20;
  int circles = 100;
  int samples = 100;  // equivariance / antipodal / metric-equation points
  std::map<std::string, double> tolerances;  // overrides by check name

  double tolerance(const std::string& check) const;
};

/// Default tolerance of each named check.
const std::map<std::string, double>& default_tolerances();

/// Full suite for a metric built from a tensor: roundtrip, mean curvature,
/// Killing constancy, metric equation, equivariance, antipodal.
VerificationReport verify_tensor(const CurvatureTensor& r, const VerifyOptions& opts = {});

/// Suite for a metric given directly (no generator): mean curvature, Killing
/// constancy, metric equation, antipodal.
VerificationReport verify_metric(const MetricField& g, const VerifyOptions& opts = {});

}  // namespace eqf
