#include "eqf/correspondence.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SVD>

#include "eqf/errors.hpp"
#include "eqf/jet_linalg.hpp"
#include "eqf/random.hpp"

namespace eqf {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_sphere_dimension(int n) {
  if (n < 2) throw DimensionError("sphere dimension must be at least 2");
}

// Each source implements eval<T> once; the two virtual entry points forward.
template <class Derived>
class SourceBase : public MetricSource {
 public:
  Mat ambient(const Vec& p) const override {
    const std::vector<double> q(p.data(), p.data() + p.size());
    const std::vector<double> g = static_cast<const Derived*>(this)->eval(q);
    const auto m = p.size();
    Mat out(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) out(i, j) = g[static_cast<std::size_t>(i * m + j)];
    }
    return out;
  }
  std::vector<Jet> ambient_jet(const std::vector<Jet>& p) const override {
    return static_cast<const Derived*>(this)->eval(p);
  }
};

template <class T>
T zero_like(const std::vector<T>& p) {
  return p[0] * 0.0;
}

class RoundSource : public SourceBase<RoundSource> {
 public:
  template <class T>
  std::vector<T> eval(const std::vector<T>& p) const {
    const std::size_t m = p.size();
    std::vector<T> g(m * m, zero_like(p));
    for (std::size_t i = 0; i < m; ++i) g[i * m + i] += 1.0;
    return g;
  }
};

// g = K / D with K(p)_bd = R(p, e_b, p, e_d) and D = det(K + p p^T)^(2/(n-1)).
class CurvatureSource : public SourceBase<CurvatureSource> {
 public:
  explicit CurvatureSource(CurvatureTensor r) : r_(std::move(r)) {}

  template <class T>
  std::vector<T> eval(const std::vector<T>& p) const {
    using std::pow;
    const int m = r_.dim();
    const auto um = static_cast<std::size_t>(m);
    std::vector<T> pp(um * um);
    for (std::size_t a = 0; a < um; ++a) {
      for (std::size_t c = a; c < um; ++c) pp[a * um + c] = pp[c * um + a] = p[a] * p[c];
    }
    std::vector<T> k(um * um, zero_like(p));
    for (int b = 0; b < m; ++b) {
      for (int d = b; d < m; ++d) {
        T s = zero_like(p);
        for (int a = 0; a < m; ++a) {
          for (int c = 0; c < m; ++c) {
            const double coef = r_(a, b, c, d);
            if (coef != 0.0) s += coef * pp[static_cast<std::size_t>(a * m + c)];
          }
        }
        k[static_cast<std::size_t>(b * m + d)] = s;
        k[static_cast<std::size_t>(d * m + b)] = s;
      }
    }
    std::vector<T> kp = k;
    for (std::size_t i = 0; i < um * um; ++i) kp[i] += pp[i];
    const T det = determinant(kp, m);
    if (!(value_of(det) > 0.0)) throw PositivityError("Killing tensor is not positive definite");
    const T inv_d = 1.0 / pow(det, 2.0 / (m - 2));
    for (T& x : k) x = x * inv_d;
    return k;
  }

 private:
  CurvatureTensor r_;
};

class BumpSource : public SourceBase<BumpSource> {
 public:
  explicit BumpSource(BumpParams params) : params_(std::move(params)) {}

  template <class T>
  std::vector<T> eval(const std::vector<T>& p) const {
    using std::exp;
    const std::size_t m = p.size();
    T dist2 = zero_like(p);
    for (std::size_t a = 0; a < m; ++a) {
      const T d = p[a] - params_.center[static_cast<Eigen::Index>(a)];
      dist2 += d * d;
    }
    const T h = params_.amplitude * exp(dist2 * (-1.0 / params_.width));
    std::vector<T> g(m * m, zero_like(p));
    for (std::size_t i = 0; i < m; ++i) {
      g[i * m + i] += 1.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double uu = params_.direction[static_cast<Eigen::Index>(i)] *
                          params_.direction[static_cast<Eigen::Index>(j)];
        if (uu != 0.0) g[i * m + j] += uu * h;
      }
    }
    return g;
  }

 private:
  BumpParams params_;
};

class QuadraticSource : public SourceBase<QuadraticSource> {
 public:
  explicit QuadraticSource(std::vector<std::pair<double, Mat>> terms) : terms_(std::move(terms)) {}

  template <class T>
  std::vector<T> eval(const std::vector<T>& p) const {
    const std::size_t m = p.size();
    std::vector<T> g(m * m, zero_like(p));
    std::vector<T> ap(m);
    for (const auto& [c, a] : terms_) {
      for (std::size_t i = 0; i < m; ++i) {
        T s = zero_like(p);
        for (std::size_t j = 0; j < m; ++j) {
          const double aij = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
          if (aij != 0.0) s += aij * p[j];
        }
        ap[i] = s;
      }
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) g[i * m + j] += c * (ap[i] * ap[j]);
      }
    }
    return g;
  }

 private:
  std::vector<std::pair<double, Mat>> terms_;
};

// det of the tangential block of A at p, computed frame-free.
double tangent_det(const Mat& a, const Vec& p) {
  const auto m = p.size();
  const Mat proj = Mat::Identity(m, m) - p * p.transpose();
  return (proj * a * proj + p * p.transpose()).determinant();
}

double frame_det(const Mat& a, const Mat& frame) {
  return (frame.transpose() * a * frame).determinant();
}

double d_from_det(double det, int n) {
  if (!(det > 0.0)) throw PositivityError("Killing tensor is not positive definite");
  return std::pow(det, 2.0 / (n - 1));
}

double f_from_det(double det, int n) {
  if (!(det > 0.0)) throw PositivityError("metric is not positive definite");
  return std::pow(det, 2.0 / (n + 1));
}

void check_positive(const CurvatureTensor& r, const CorrespondenceOptions& opts) {
  require_sphere_dimension(r.n());
  if (opts.allow_degenerate) return;
  const PositivityProbe probe = is_positive(r, opts.margin, opts.probe);
  if (!probe.positive) {
    std::ostringstream msg;
    msg << "positivity probe minimum " << probe.min_value << " is below margin " << opts.margin;
    throw PositivityError(msg.str());
  }
}

}  // namespace

MetricField::MetricField(int n, MetricKind kind, std::string construction,
                         std::shared_ptr<const MetricSource> source,
                         std::optional<CurvatureTensor> generator)
    : n_(n),
      kind_(kind),
      construction_(std::move(construction)),
      source_(std::move(source)),
      generator_(std::move(generator)) {
  require_sphere_dimension(n);
}

Mat MetricField::in_frame(const Vec& p, const Mat& frame) const {
  return frame.transpose() * ambient(p) * frame;
}

SymmetricTensorField MetricField::as_field() const {
  auto source = source_;
  return SymmetricTensorField(n_, [source](const Vec& p) { return source->ambient(p); });
}

KillingField killing_from_curv(const CurvatureTensor& r, const CorrespondenceOptions& opts) {
  check_positive(r, opts);
  return KillingField(r);
}

double volume_ratio_D(const KillingField& k, const Vec& p) {
  return d_from_det(tangent_det(k.ambient(p), p), k.n());
}

double volume_ratio_D(const KillingField& k, const Vec& p, const Mat& frame) {
  return d_from_det(frame_det(k.ambient(p), frame), k.n());
}

MetricField metric_from_curv(const CurvatureTensor& r, const CorrespondenceOptions& opts) {
  check_positive(r, opts);
  return MetricField(r.n(), MetricKind::curvature, "curvature",
                     std::make_shared<CurvatureSource>(r), r);
}

double F_from_metric(const MetricField& g, const Vec& p) {
  return f_from_det(tangent_det(g.ambient(p), p), g.n());
}

double F_from_metric(const MetricField& g, const Vec& p, const Mat& frame) {
  return f_from_det(frame_det(g.ambient(p), frame), g.n());
}

ScalarField D_field(const KillingField& k) {
  return {ScalarField::Role::D, [k](const Vec& p) { return volume_ratio_D(k, p); }};
}

ScalarField F_field(const MetricField& g) {
  return {ScalarField::Role::F, [g](const Vec& p) { return F_from_metric(g, p); }};
}

ScalarField psi_field(const MetricField& g) {
  const double power = (g.n() + 1) / 4.0;
  return {ScalarField::Role::psi,
          [g, power](const Vec& p) { return std::pow(F_from_metric(g, p), power); }};
}

ScalarField delta_field(const GroupElement& t) {
  return {ScalarField::Role::delta, [t](const Vec& p) { return jacobian_density(t, p); }};
}

MetricField round_metric(int n) {
  return MetricField(n, MetricKind::round, "round", std::make_shared<RoundSource>());
}

MetricField bump_metric(int n, BumpParams params) {
  require_sphere_dimension(n);
  if (params.center.size() == 0) params.center = Vec::Unit(n + 1, 0);
  if (params.direction.size() == 0) params.direction = Vec::Unit(n + 1, 1);
  if (params.center.size() != n + 1 || params.direction.size() != n + 1) {
    throw DimensionError("bump center and direction must have n+1 entries");
  }
  if (!(params.width > 0.0)) throw DomainError("bump width must be positive");
  if (!(params.amplitude > -1.0)) throw DomainError("bump amplitude must exceed -1");
  return MetricField(n, MetricKind::bump, "bump", std::make_shared<BumpSource>(params));
}

MetricField quadratic_metric(int n, std::vector<std::pair<double, Mat>> terms,
                             std::string construction) {
  require_sphere_dimension(n);
  for (const auto& term : terms) {
    if (term.second.rows() != n + 1 || term.second.cols() != n + 1) {
      throw DimensionError("quadratic metric terms must be (n+1) x (n+1)");
    }
  }
  return MetricField(n, MetricKind::quadratic, std::move(construction),
                     std::make_shared<QuadraticSource>(std::move(terms)));
}

double killing_constancy_residual(const SymmetricTensorField& k, const ConstancyOptions& opts) {
  const int m = k.n() + 1;
  Rng rng(opts.seed);
  double worst = 0.0;
  for (int c = 0; c < opts.circles; ++c) {
    const Vec p = opts.focus.size() == m ? Vec(opts.focus.normalized()) : rng.unit(m);
    const Vec u = rng.unit_orthogonal(p);
    double lo = 0.0;
    double hi = 0.0;
    for (int s = 0; s < opts.samples; ++s) {
      const double t = 2.0 * kPi * s / opts.samples;
      const auto [x, dx] = great_circle(p, u, t);
      const double value = k(x, dx, dx);
      if (s == 0 || value < lo) lo = value;
      if (s == 0 || value > hi) hi = value;
    }
    worst = std::max(worst, hi - lo);
  }
  return worst;
}

MetricKilling killing_from_metric(const MetricField& g, const ConstancyOptions& opts) {
  const int n = g.n();
  SymmetricTensorField field(n, [g, n](const Vec& p) -> Mat {
    const Mat a = g.ambient(p);
    return a / f_from_det(tangent_det(a, p), n);
  });
  const double residual = killing_constancy_residual(field, opts);
  return {std::move(field), residual};
}

Recovery curv_from_killing(const SymmetricTensorField& k, const RecoveryOptions& opts) {
  const int n = k.n();
  const int m = n + 1;
  const auto& basis = curv_basis(n);
  const int dim = static_cast<int>(basis.size());
  int samples = std::max(opts.oversample, 3) * dim;
  for (int attempt = 0; attempt < 4; ++attempt, samples *= 2) {
    Rng rng(opts.seed + static_cast<std::uint64_t>(attempt));
    Mat a(samples, dim);
    Vec b(samples);
    for (int s = 0; s < samples; ++s) {
      const Vec p = rng.unit(m);
      const Vec v = rng.unit_orthogonal(p);
      for (int j = 0; j < dim; ++j) a(s, j) = basis[static_cast<std::size_t>(j)].evaluate(p, v, p, v);
      b[s] = k(p, v, v);
    }
    Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& sv = svd.singularValues();
    const double ratio = sv[0] / sv[sv.size() - 1];
    const double condition = ratio * ratio;
    if (!(condition <= 1e10)) continue;
    const Vec coords = svd.solve(b);
    Recovery out{from_basis_coordinates(n, coords), 0.0, condition, samples};
    out.residual = (a * coords - b).cwiseAbs().maxCoeff();
    return out;
  }
  throw SamplingError("sampled curvature system stayed rank deficient");
}

MetricJet metric_derivatives(const MetricField& g, const GnomonicChart& chart, const Vec& x) {
  const int n = chart.n();
  if (n != g.n()) throw DimensionError("chart and metric dimensions differ");
  const int m = n + 1;
  const std::vector<Jet> p = point_jet(chart, x);
  const std::vector<std::vector<Jet>> dp = coordinate_vector_jets(chart, x);
  const std::vector<Jet> gg = g.ambient_jet(p);

  MetricJet out;
  out.g = Mat::Zero(n, n);
  out.dg.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  out.d2g.assign(static_cast<std::size_t>(n * n), Mat::Zero(n, n));
  std::vector<Jet> h(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) {
    const auto& dpi = dp[static_cast<std::size_t>(i)];
    for (int b = 0; b < m; ++b) {
      Jet s(0.0, n);
      for (int a = 0; a < m; ++a) s += dpi[static_cast<std::size_t>(a)] * gg[static_cast<std::size_t>(a * m + b)];
      h[static_cast<std::size_t>(b)] = s;
    }
    for (int j = i; j < n; ++j) {
      const auto& dpj = dp[static_cast<std::size_t>(j)];
      Jet gij(0.0, n);
      for (int b = 0; b < m; ++b) gij += h[static_cast<std::size_t>(b)] * dpj[static_cast<std::size_t>(b)];
      out.g(i, j) = out.g(j, i) = gij.value();
      for (int k = 0; k < n; ++k) {
        out.dg[static_cast<std::size_t>(k)](i, j) = out.dg[static_cast<std::size_t>(k)](j, i) = gij.grad(k);
        for (int l = 0; l < n; ++l) {
          Mat& d2 = out.d2g[static_cast<std::size_t>(k * n + l)];
          d2(i, j) = d2(j, i) = gij.hess(k, l);
        }
      }
    }
  }
  return out;
}

}  // namespace eqf
