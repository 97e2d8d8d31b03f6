#include "eqf/sphere_geom.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "eqf/errors.hpp"
#include "eqf/random.hpp"

namespace eqf {

namespace {

constexpr double kPi = std::numbers::pi;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

SpherePoint::SpherePoint(Vec coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw DimensionError("sphere points need at least two coordinates");
  if (std::abs(coords_.norm() - 1.0) > 1e-12) {
    throw DomainError("point is not on the unit sphere");
  }
}

SpherePoint SpherePoint::normalized(const Vec& v) {
  const double norm = v.norm();
  if (!(norm > 0.0)) throw DomainError("cannot normalize the zero vector");
  return SpherePoint(v / norm);
}

Equator::Equator(const Vec& normal) {
  const double norm = normal.norm();
  if (normal.size() < 2 || !(norm > 1e-12)) throw DomainError("equator normal must be non-zero");
  normal_ = normal / norm;
  for (Eigen::Index i = 0; i < normal_.size(); ++i) {
    if (std::abs(normal_[i]) > 1e-12) {
      if (normal_[i] < 0.0) normal_ = -normal_;
      break;
    }
  }
  span_ = tangent_frame(normal_);
}

Mat tangent_frame(const Vec& p) {
  const auto m = p.size();
  Eigen::Index drop = 0;
  for (Eigen::Index i = 1; i < m; ++i) {
    if (std::abs(p[i]) > std::abs(p[drop])) drop = i;
  }
  const Vec unit = p / p.norm();
  Mat frame(m, m - 1);
  Eigen::Index col = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (i == drop) continue;
    Vec e = Vec::Unit(m, i);
    for (int pass = 0; pass < 2; ++pass) {
      e -= e.dot(unit) * unit;
      for (Eigen::Index c = 0; c < col; ++c) e -= e.dot(frame.col(c)) * frame.col(c);
    }
    frame.col(col++) = e / e.norm();
  }
  return frame;
}

GnomonicChart::GnomonicChart(const SpherePoint& center)
    : GnomonicChart(center, tangent_frame(center.coords())) {}

GnomonicChart::GnomonicChart(const SpherePoint& center, Mat frame)
    : center_(center), frame_(std::move(frame)) {
  const int n = center_.n();
  if (frame_.rows() != n + 1 || frame_.cols() != n) {
    throw DimensionError("chart frame must be (n+1) x n");
  }
  const double ortho = (frame_.transpose() * frame_ - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
  const double perp = (frame_.transpose() * center_.coords()).cwiseAbs().maxCoeff();
  if (ortho > 1e-12 || perp > 1e-12) {
    throw DomainError("chart frame must be orthonormal and tangent at the center");
  }
}

Vec GnomonicChart::point(const Vec& x) const {
  if (x.size() != n()) throw DimensionError("chart coordinates have the wrong length");
  if (!(x.norm() < kMaxRadius)) throw DomainError("point outside the chart radius");
  const Vec y = center() + frame_ * x;
  return y / std::sqrt(1.0 + x.squaredNorm());
}

Vec GnomonicChart::coordinates(const Vec& p) const {
  const double h = p.dot(center());
  if (!(h > 0.0)) throw DomainError("point is not in the chart's open hemisphere");
  return frame_.transpose() * p / h;
}

namespace {

struct ChartJets {
  std::vector<Jet> y;  // center + frame x
  Jet inv_r;           // 1 / sqrt(1 + |x|^2)
  std::vector<Jet> x;
};

ChartJets chart_jets(const GnomonicChart& chart, const Vec& x) {
  const int n = chart.n();
  if (x.size() != n) throw DimensionError("chart coordinates have the wrong length");
  if (!(x.norm() < GnomonicChart::kMaxRadius)) throw DomainError("point outside the chart radius");
  ChartJets out;
  Jet r2(1.0, n);
  for (int i = 0; i < n; ++i) {
    out.x.push_back(Jet::variable(x[i], i, n));
    r2 += out.x.back() * out.x.back();
  }
  out.inv_r = 1.0 / sqrt(r2);
  for (int a = 0; a <= n; ++a) {
    Jet ya(chart.center()[a], n);
    for (int i = 0; i < n; ++i) ya += chart.frame()(a, i) * out.x[static_cast<std::size_t>(i)];
    out.y.push_back(ya);
  }
  return out;
}

}  // namespace

std::vector<Jet> point_jet(const GnomonicChart& chart, const Vec& x) {
  const ChartJets cj = chart_jets(chart, x);
  std::vector<Jet> p;
  for (const Jet& ya : cj.y) p.push_back(ya * cj.inv_r);
  return p;
}

std::vector<std::vector<Jet>> coordinate_vector_jets(const GnomonicChart& chart, const Vec& x) {
  const ChartJets cj = chart_jets(chart, x);
  const int n = chart.n();
  const Jet inv_r3 = cj.inv_r * cj.inv_r * cj.inv_r;
  // d/dx_i (y / r) = e_i / r - y x_i / r^3
  std::vector<std::vector<Jet>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Jet s = cj.x[static_cast<std::size_t>(i)] * inv_r3;
    for (int a = 0; a <= n; ++a) {
      out[static_cast<std::size_t>(i)].push_back(chart.frame()(a, i) * cj.inv_r -
                                                 cj.y[static_cast<std::size_t>(a)] * s);
    }
  }
  return out;
}

std::pair<Vec, Vec> great_circle(const Vec& p, const Vec& u, double t) {
  if (p.size() != u.size()) throw DimensionError("point and direction sizes differ");
  if (std::abs(u.norm() - 1.0) > 1e-10 || std::abs(u.dot(p)) > 1e-10) {
    throw DomainError("great circle direction must be a unit tangent vector");
  }
  const double c = std::cos(t);
  const double s = std::sin(t);
  return {c * p + s * u, -s * p + c * u};
}

Vec phi_T(const GroupElement& t, const Vec& p) {
  if (p.size() != t.matrix().rows()) throw DimensionError("point and group element sizes differ");
  const Vec tp = t.matrix() * p;
  return tp / tp.norm();
}

Vec dphi_T(const GroupElement& t, const Vec& p, const Vec& w) {
  const Vec tp = t.matrix() * p;
  const Vec tw = t.matrix() * w;
  const double norm2 = tp.squaredNorm();
  return (tw - (tw.dot(tp) / norm2) * tp) / std::sqrt(norm2);
}

double jacobian_density(const GroupElement& t, const Vec& p) {
  const double m = static_cast<double>(t.matrix().rows());
  const double tp = (t.matrix() * p).norm();
  return std::pow(std::abs(t.det()), 4.0 / m) / std::pow(tp, 4.0);
}

Integral integrate(const QuadratureRule& rule, const std::function<double(const Vec&)>& f) {
  CompensatedSum sum;
  std::vector<double> values(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    values[i] = f(rule.nodes[i]);
    sum.add(rule.weights[i] * values[i]);
  }
  Integral out{sum.value(), 0.0};
  if (rule.monte_carlo && rule.nodes.size() >= 4) {
    // antithetic pairs are stored consecutively
    const std::size_t pairs = rule.nodes.size() / 2;
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < pairs; ++k) {
      const double x = 0.5 * (values[2 * k] + values[2 * k + 1]);
      const double delta = x - mean;
      mean += delta / static_cast<double>(k + 1);
      m2 += delta * (x - mean);
    }
    const double var = m2 / static_cast<double>(pairs - 1);
    out.standard_error = rule.reference_measure * std::sqrt(var / static_cast<double>(pairs));
  }
  return out;
}

double sphere_volume(int k) {
  const double h = 0.5 * static_cast<double>(k + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int count) {
  if (count < 1) throw DomainError("Gauss-Legendre rule needs at least one node");
  std::vector<double> x(static_cast<std::size_t>(count));
  std::vector<double> w(static_cast<std::size_t>(count));
  for (int i = 0; i < (count + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (count + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = 0.0;
      for (int j = 1; j <= count; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
      }
      dp = count * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double weight = 2.0 / ((1.0 - z * z) * dp * dp);
    x[static_cast<std::size_t>(i)] = -z;
    x[static_cast<std::size_t>(count - 1 - i)] = z;
    w[static_cast<std::size_t>(i)] = weight;
    w[static_cast<std::size_t>(count - 1 - i)] = weight;
  }
  return {x, w};
}

namespace {

// Gauss-Legendre in cos(theta) times trapezoid in phi on the unit 2-sphere,
// embedded through the orthonormal columns of `span`.
QuadratureRule two_sphere_rule(const Mat& span, int order) {
  QuadratureRule rule;
  const auto [t, wt] = gauss_legendre(order);
  const int naz = 2 * order;
  rule.polar_count = order;
  rule.azimuthal_count = naz;
  rule.exact_degree = 2 * order - 1;
  rule.reference_measure = 4.0 * kPi;
  rule.span = span;
  for (int a = 0; a < naz; ++a) rule.azimuthal_angles.push_back(2.0 * kPi * a / naz);
  for (int i = 0; i < order; ++i) {
    const double ct = t[static_cast<std::size_t>(i)];
    const double st = std::sqrt(1.0 - ct * ct);
    rule.polar_angles.push_back(std::acos(ct));
    for (int a = 0; a < naz; ++a) {
      const double phi = rule.azimuthal_angles[static_cast<std::size_t>(a)];
      rule.nodes.push_back(st * std::cos(phi) * span.col(0) + st * std::sin(phi) * span.col(1) +
                           ct * span.col(2));
      rule.weights.push_back(wt[static_cast<std::size_t>(i)] * 2.0 * kPi / naz);
    }
  }
  return rule;
}

QuadratureRule circle_rule(const Mat& span, int order) {
  QuadratureRule rule;
  const int count = 2 * order;
  rule.exact_degree = count - 1;
  rule.reference_measure = 2.0 * kPi;
  rule.span = span;
  for (int a = 0; a < count; ++a) {
    const double phi = 2.0 * kPi * a / count;
    rule.nodes.push_back(std::cos(phi) * span.col(0) + std::sin(phi) * span.col(1));
    rule.weights.push_back(2.0 * kPi / count);
  }
  return rule;
}

QuadratureRule monte_carlo_rule(const Mat& span, int samples, std::uint64_t seed) {
  QuadratureRule rule;
  rule.monte_carlo = true;
  const int k = static_cast<int>(span.cols()) - 1;  // sphere dimension of the domain
  rule.reference_measure = sphere_volume(k);
  rule.span = span;
  Rng rng(seed);
  const int pairs = std::max(2, samples / 2);
  for (int i = 0; i < pairs; ++i) {
    const Vec y = span * rng.unit(static_cast<int>(span.cols()));
    rule.nodes.push_back(y);
    rule.nodes.push_back(-y);
  }
  const double w = rule.reference_measure / static_cast<double>(rule.nodes.size());
  rule.weights.assign(rule.nodes.size(), w);
  return rule;
}

}  // namespace

QuadratureRule equator_quadrature(const Equator& v, int order, std::uint64_t seed) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  switch (v.n()) {
    case 2:
      return circle_rule(v.span(), order);
    case 3:
      return two_sphere_rule(v.span(), order);
    default:
      return monte_carlo_rule(v.span(), order * order, seed);
  }
}

QuadratureRule sphere_quadrature(int n, int order, std::uint64_t seed) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  if (n < 2) throw DimensionError("sphere quadrature needs n >= 2");
  const Mat identity = Mat::Identity(n + 1, n + 1);
  if (n > 3) return monte_carlo_rule(identity, order * order * order, seed);

  // x = (t, sqrt(1 - t^2) y) with y on S^(n-1); the t-weight is (1 - t^2)^((n-2)/2).
  const Mat inner_span = Mat::Identity(n, n);
  QuadratureRule inner = n == 2 ? circle_rule(inner_span, order) : two_sphere_rule(inner_span, order);
  std::vector<double> t;
  std::vector<double> wt;
  if (n == 2) {
    std::tie(t, wt) = gauss_legendre(order);
  } else {
    // Gauss-Chebyshev of the second kind: weight sqrt(1 - t^2)
    for (int k = 1; k <= order; ++k) {
      const double theta = kPi * k / (order + 1);
      t.push_back(std::cos(theta));
      wt.push_back(kPi / (order + 1) * std::sin(theta) * std::sin(theta));
    }
  }
  QuadratureRule rule;
  rule.exact_degree = std::min(inner.exact_degree, 2 * order - 1);
  rule.reference_measure = sphere_volume(n);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double s = std::sqrt(1.0 - t[i] * t[i]);
    for (std::size_t j = 0; j < inner.nodes.size(); ++j) {
      Vec x(n + 1);
      x[0] = t[i];
      x.tail(n) = s * inner.nodes[j];
      rule.nodes.push_back(std::move(x));
      rule.weights.push_back(wt[i] * inner.weights[j]);
    }
  }
  return rule;
}

std::string quadrature_csv(const QuadratureRule& rule) {
  std::ostringstream out;
  out << std::setprecision(17);
  if (!rule.nodes.empty()) {
    for (Eigen::Index i = 0; i < rule.nodes.front().size(); ++i) out << 'x' << i << ',';
    out << "weight\n";
  }
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    for (Eigen::Index i = 0; i < rule.nodes[k].size(); ++i) out << rule.nodes[k][i] << ',';
    out << rule.weights[k] << '\n';
  }
  return out.str();
}

}  // namespace eqf
