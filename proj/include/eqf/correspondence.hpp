#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eqf/jet.hpp"
#include "eqf/killing_field.hpp"
#include "eqf/sphere_geom.hpp"
#include "eqf/tensor_core.hpp"

namespace eqf {

enum class MetricKind { round, curvature, bump, quadratic };

/// Closed-form ambient evaluator behind a MetricField.
class MetricSource {
 public:
  virtual ~MetricSource() = default;
  virtual Mat ambient(const Vec& p) const = 0;
  /// Same matrix, row major, with jet-valued coordinates.
  virtual std::vector<Jet> ambient_jet(const std::vector<Jet>& p) const = 0;
};

/// Riemannian metric on S^n given by a closed-form ambient matrix field G:
/// g_p(v, w) = v^T G(p) w for v, w tangent at p.
///
/// Cheap to copy; the evaluator is shared and immutable, so evaluation is
/// thread safe.
class MetricField {
 public:
  MetricField(int n, MetricKind kind, std::string construction,
              std::shared_ptr<const MetricSource> source,
              std::optional<CurvatureTensor> generator = std::nullopt);

  int n() const { return n_; }
  MetricKind kind() const { return kind_; }
  const std::string& construction() const { return construction_; }
  /// The curvature tensor this metric was built from, if any.
  const std::optional<CurvatureTensor>& generator() const { return generator_; }

  Mat ambient(const Vec& p) const { return source_->ambient(p); }
  std::vector<Jet> ambient_jet(const std::vector<Jet>& p) const {
    return source_->ambient_jet(p);
  }
  /// Matrix of g_p in the given frame (columns tangent at p).
  Mat in_frame(const Vec& p, const Mat& frame) const;
  double operator()(const Vec& p, const Vec& v, const Vec& w) const {
    return v.dot(ambient(p) * w);
  }

  /// The field as a plain symmetric-tensor evaluator.
  SymmetricTensorField as_field() const;

  /// Copy with the generator replaced.
  MetricField with_generator(CurvatureTensor r) const {
    MetricField copy = *this;
    copy.generator_ = std::move(r);
    return copy;
  }

 private:
  int n_;
  MetricKind kind_;
  std::string construction_;
  std::shared_ptr<const MetricSource> source_;
  std::optional<CurvatureTensor> generator_;
};

/// Pointwise positive function on S^n with a role tag.
struct ScalarField {
  enum class Role { D, F, psi, delta, custom };

  Role role = Role::custom;
  std::function<double(const Vec&)> eval;

  double operator()(const Vec& p) const { return eval(p); }
};

struct CorrespondenceOptions {
  double margin = 1e-6;         // refuse tensors whose probe minimum is below this
  bool allow_degenerate = false;
  ProbeOptions probe;
};

/// k_p(v, w) = R(p, v, p, w). Throws PositivityError when the positivity probe
/// reports a minimum below `opts.margin`, unless `opts.allow_degenerate`.
KillingField killing_from_curv(const CurvatureTensor& r, const CorrespondenceOptions& opts = {});

/// D_k(p) = det(k_p)^(2/(n-1)), the determinant taken in an orthonormal frame.
/// Throws PositivityError on a non-positive determinant.
double volume_ratio_D(const KillingField& k, const Vec& p);
double volume_ratio_D(const KillingField& k, const Vec& p, const Mat& frame);

/// g_R = k_R / D_R.
MetricField metric_from_curv(const CurvatureTensor& r, const CorrespondenceOptions& opts = {});

/// F_g(p) = det(g_p)^(2/(n+1)) in an orthonormal frame.
double F_from_metric(const MetricField& g, const Vec& p);
double F_from_metric(const MetricField& g, const Vec& p, const Mat& frame);

ScalarField D_field(const KillingField& k);
ScalarField F_field(const MetricField& g);
/// psi = F^((n+1)/4), so that dV_g = psi dV.
ScalarField psi_field(const MetricField& g);
ScalarField delta_field(const GroupElement& t);

/// The round metric.
MetricField round_metric(int n);

/// Round metric plus amplitude * exp(-|p - center|^2 / width) * direction
/// direction^T, a smooth metric whose equators are not minimal.
struct BumpParams {
  double amplitude = 0.1;
  double width = 0.04;
  Vec center;     // default e_0
  Vec direction;  // default e_1
};
MetricField bump_metric(int n, BumpParams params = {});

/// G(p) = sum_i c_i (A_i p)(A_i p)^T for matrices A_i.
MetricField quadratic_metric(int n, std::vector<std::pair<double, Mat>> terms,
                             std::string construction);

struct ConstancyOptions {
  int circles = 100;
  int samples = 100;  // values of t per circle
  std::uint64_t seed = 1;
  Vec focus;          // when set, every circle starts there
};

/// Max over seeded great circles of max_t k(g', g') - min_t k(g', g').
double killing_constancy_residual(const SymmetricTensorField& k, const ConstancyOptions& opts = {});

struct MetricKilling {
  SymmetricTensorField field;  // k_g = g / F_g
  double constancy_residual = 0.0;
};

/// k_g = g / F_g, with its Killing constancy residual.
MetricKilling killing_from_metric(const MetricField& g, const ConstancyOptions& opts = {});

struct RecoveryOptions {
  std::uint64_t seed = 1;
  int oversample = 4;  // samples per unknown
};

struct Recovery {
  CurvatureTensor tensor;
  double residual = 0.0;   // max |R(p,v,p,v) - k_p(v,v)| over the samples
  double condition = 0.0;  // of the normal equations
  int samples = 0;
};

/// Solve R(p_j, v_j, p_j, v_j) = k_{p_j}(v_j, v_j) for R in Curv by least
/// squares over seeded samples. Doubles the sample count when the normal
/// system's condition exceeds 1e10; throws SamplingError if it stays there.
Recovery curv_from_killing(const SymmetricTensorField& k, const RecoveryOptions& opts = {});

/// Metric components in a gnomonic chart with first and second partials.
struct MetricJet {
  Mat g;                // g_ij
  std::vector<Mat> dg;  // dg[k](i, j) = d_k g_ij
  std::vector<Mat> d2g; // d2g[k * n + l](i, j) = d_k d_l g_ij

  int n() const { return static_cast<int>(g.rows()); }
  const Mat& second(int k, int l) const { return d2g[static_cast<std::size_t>(k * n() + l)]; }
};

/// Exact (closed-form, via jets) chart components of g and their derivatives.
MetricJet metric_derivatives(const MetricField& g, const GnomonicChart& chart, const Vec& x);

}  // namespace eqf
