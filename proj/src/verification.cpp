#include "eqf/verification.hpp"

#include <cmath>

#include <json.hpp>

#include "eqf/errors.hpp"
#include "eqf/parallel.hpp"
#include "eqf/random.hpp"
#include "eqf/version.hpp"

namespace eqf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// d_m Gamma^k_ij, as dgamma[m][k](i, j).
std::vector<std::vector<Mat>> christoffel_derivatives(const ChristoffelData& c) {
  const int n = c.n();
  const MetricJet& mj = c.metric;
  std::vector<std::vector<Mat>> out(static_cast<std::size_t>(n),
                                    std::vector<Mat>(static_cast<std::size_t>(n), Mat::Zero(n, n)));
  for (int m = 0; m < n; ++m) {
    const Mat dginv = -c.ginv * mj.dg[static_cast<std::size_t>(m)] * c.ginv;
    for (int k = 0; k < n; ++k) {
      Mat& d = out[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)];
      for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) {
            const double first = mj.dg[static_cast<std::size_t>(i)](j, l) +
                                 mj.dg[static_cast<std::size_t>(j)](i, l) -
                                 mj.dg[static_cast<std::size_t>(l)](i, j);
            const double second = mj.second(m, i)(j, l) + mj.second(m, j)(i, l) -
                                  mj.second(m, l)(i, j);
            s += dginv(k, l) * first + c.ginv(k, l) * second;
          }
          d(i, j) = d(j, i) = 0.5 * s;
        }
      }
    }
  }
  return out;
}

// (E_ijk + E_jki + E_kij) / 3 for E symmetric in its first two slots; max-norm.
double symmetrized_max(const std::vector<double>& e, int n) {
  const auto at = [n](int i, int j, int k) { return static_cast<std::size_t>((i * n + j) * n + k); };
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double s = (e[at(i, j, k)] + e[at(j, k, i)] + e[at(k, i, j)]) / 3.0;
        worst = std::max(worst, std::abs(s));
      }
    }
  }
  return worst;
}

// (nabla^round_k g)_ij as an array indexed (i, j, k).
std::vector<double> round_covariant_derivative(const ChristoffelData& gc, const ChristoffelData& rc) {
  const int n = gc.n();
  const MetricJet& mj = gc.metric;
  std::vector<double> out(static_cast<std::size_t>(n * n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double s = mj.dg[static_cast<std::size_t>(k)](i, j);
        for (int l = 0; l < n; ++l) s -= rc(l, k, i) * mj.g(l, j) + rc(l, k, j) * mj.g(i, l);
        out[static_cast<std::size_t>((i * n + j) * n + k)] = s;
      }
    }
  }
  return out;
}

Vec dlog_psi_from(const ChristoffelData& gc, const ChristoffelData& rc) {
  const int n = gc.n();
  Vec out(n);
  for (int k = 0; k < n; ++k) {
    out[k] = 0.5 * ((gc.ginv * gc.metric.dg[static_cast<std::size_t>(k)]).trace() -
                    (rc.ginv * rc.metric.dg[static_cast<std::size_t>(k)]).trace());
  }
  return out;
}

FundamentalTensor fundamental_from(const ChristoffelData& gc, const ChristoffelData& rc) {
  const int n = gc.n();
  FundamentalTensor t{n, std::vector<double>(static_cast<std::size_t>(n * n * n))};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += gc.metric.g(k, l) * (gc(l, i, j) - rc(l, i, j));
        t.t[static_cast<std::size_t>((i * n + j) * n + k)] = s;
      }
    }
  }
  return t;
}

GnomonicChart centered_chart(const Vec& p) { return GnomonicChart(SpherePoint(p)); }

Mat random_group_matrix(Rng& rng, int m) {
  for (;;) {
    Mat t = Mat::Identity(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) t(i, j) += 0.3 * rng.normal();
    }
    if (std::abs(t.determinant()) > 0.1) return t;
  }
}

}  // namespace

ChristoffelData christoffels(const MetricField& g, const GnomonicChart& chart, const Vec& x) {
  ChristoffelData out;
  out.metric = metric_derivatives(g, chart, x);
  const int n = out.metric.n();
  Eigen::LLT<Mat> llt(out.metric.g);
  if (llt.info() != Eigen::Success) throw DomainError("metric is not positive definite in the chart");
  out.ginv = llt.solve(Mat::Identity(n, n));
  out.gamma.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += out.ginv(k, l) * (out.metric.dg[static_cast<std::size_t>(i)](j, l) +
                                 out.metric.dg[static_cast<std::size_t>(j)](i, l) -
                                 out.metric.dg[static_cast<std::size_t>(l)](i, j));
        }
        out.gamma[static_cast<std::size_t>(k)](i, j) = 0.5 * s;
        out.gamma[static_cast<std::size_t>(k)](j, i) = 0.5 * s;
      }
    }
  }
  return out;
}

HeightDerivatives height_derivatives(const MetricField& g, const Vec& v, const Vec& p) {
  return height_derivatives(g, v, centered_chart(p));
}

HeightDerivatives height_derivatives(const MetricField& g, const Vec& v, const GnomonicChart& chart) {
  const int n = chart.n();
  if (v.size() != n + 1) throw DimensionError("height direction has the wrong length");
  const Vec origin = Vec::Zero(n);
  const ChristoffelData c = christoffels(g, chart, origin);
  const std::vector<Jet> p = point_jet(chart, origin);
  Jet height(0.0, n);
  for (int a = 0; a <= n; ++a) height += v[a] * p[static_cast<std::size_t>(a)];

  HeightDerivatives out;
  out.frame = chart.frame();
  out.differential = Vec(n);
  for (int i = 0; i < n; ++i) out.differential[i] = height.grad(i);
  out.hessian = Mat(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = height.hess(i, j);
      for (int k = 0; k < n; ++k) s -= c(k, i, j) * out.differential[k];
      out.hessian(i, j) = s;
    }
  }
  out.gradient = c.ginv * out.differential;
  out.gradient_norm = std::sqrt(out.differential.dot(out.gradient));
  out.laplacian = (c.ginv.cwiseProduct(out.hessian)).sum();
  return out;
}

double mean_curvature_equator(const MetricField& g, const Equator& v, const Vec& p) {
  if (std::abs(p.dot(v.normal())) > 1e-10) throw DomainError("point is not on the equator");
  const HeightDerivatives h = height_derivatives(g, v.normal(), p);
  const Vec nrm = h.normal();
  return (h.laplacian - nrm.dot(h.hessian * nrm)) / h.gradient_norm;
}

double FundamentalTensor::operator()(const Vec& x, const Vec& y, const Vec& z) const {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) s += (*this)(i, j, k) * x[i] * y[j] * z[k];
    }
  }
  return s;
}

FundamentalTensor fundamental_tensor(const MetricField& g, const GnomonicChart& chart, const Vec& x) {
  return fundamental_from(christoffels(g, chart, x), christoffels(round_metric(g.n()), chart, x));
}

double fundamental_tensor(const MetricField& g, const GnomonicChart& chart, const Vec& x,
                          const Vec& X, const Vec& Y, const Vec& Z) {
  return fundamental_tensor(g, chart, x)(X, Y, Z);
}

Vec dlog_psi(const MetricField& g, const GnomonicChart& chart, const Vec& x) {
  return dlog_psi_from(christoffels(g, chart, x), christoffels(round_metric(g.n()), chart, x));
}

double metric_equation_residual(const MetricField& g, const GnomonicChart& chart, const Vec& x) {
  const ChristoffelData gc = christoffels(g, chart, x);
  const ChristoffelData rc = christoffels(round_metric(g.n()), chart, x);
  const int n = gc.n();
  const Vec a = dlog_psi_from(gc, rc);
  std::vector<double> e = round_covariant_derivative(gc, rc);
  const double c = 4.0 / (n + 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) e[static_cast<std::size_t>((i * n + j) * n + k)] -= c * a[k] * gc.metric.g(i, j);
    }
  }
  return symmetrized_max(e, n);
}

double trace_equation_residual(const MetricField& g, const GnomonicChart& chart, const Vec& x) {
  const ChristoffelData gc = christoffels(g, chart, x);
  const ChristoffelData rc = christoffels(round_metric(g.n()), chart, x);
  const int n = gc.n();
  const FundamentalTensor t = fundamental_from(gc, rc);
  Vec tr(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) s += gc.ginv(i, j) * t(i, j, k);
    }
    tr[k] = s;
  }
  std::vector<double> e = t.t;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) e[static_cast<std::size_t>((i * n + j) * n + k)] -= gc.metric.g(i, j) * tr[k];
    }
  }
  return symmetrized_max(e, n);
}

CurvatureData curvature_of_metric(const MetricField& g, const GnomonicChart& chart, const Vec& x) {
  const ChristoffelData c = christoffels(g, chart, x);
  const auto dgamma = christoffel_derivatives(c);
  const int n = c.n();
  const auto un = static_cast<std::size_t>(n);
  const auto dG = [&](int m, int k, int i, int j) {
    return dgamma[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)](i, j);
  };
  // up[((l * n + i) * n + j) * n + k] = R^l_ijk, with R(d_i, d_j) d_k = R^l_ijk d_l
  std::vector<double> up(un * un * un * un);
  for (int l = 0; l < n; ++l) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          double s = dG(i, l, j, k) - dG(j, l, i, k);
          for (int m = 0; m < n; ++m) s += c(l, i, m) * c(m, j, k) - c(l, j, m) * c(m, i, k);
          up[static_cast<std::size_t>(((l * n + i) * n + j) * n + k)] = s;
        }
      }
    }
  }
  CurvatureData out;
  out.n = n;
  out.riemann.assign(un * un * un * un, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int q = 0; q < n; ++q) s += c.metric.g(k, q) * up[static_cast<std::size_t>(((q * n + i) * n + j) * n + l)];
          out.riemann[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)] = s;
        }
      }
    }
  }
  out.ricci = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += up[static_cast<std::size_t>(((i * n + i) * n + j) * n + k)];
      out.ricci(j, k) = s;
    }
  }
  out.scalar = (c.ginv.cwiseProduct(out.ricci)).sum();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        for (int l = 0; l < n; ++l) {
          const double b = out(i, j, k, l) + out(i, k, l, j) + out(i, l, j, k);
          out.bianchi_residual = std::max(out.bianchi_residual, std::abs(b));
        }
      }
    }
  }
  return out;
}

FundamentalChecks fundamental_checks(const MetricField& g, const Equator& v, const Vec& p) {
  if (std::abs(p.dot(v.normal())) > 1e-10) throw DomainError("point is not on the equator");
  const GnomonicChart chart = centered_chart(p);
  const int n = chart.n();
  const Vec origin = Vec::Zero(n);
  const ChristoffelData gc = christoffels(g, chart, origin);
  const ChristoffelData rc = christoffels(round_metric(n), chart, origin);
  const FundamentalTensor t = fundamental_from(gc, rc);
  const std::vector<double> cov = round_covariant_derivative(gc, rc);
  const Vec a = dlog_psi_from(gc, rc);
  const HeightDerivatives h = height_derivatives(g, v.normal(), chart);

  FundamentalChecks out;
  std::vector<double> diff(t.t.size());
  for (std::size_t q = 0; q < diff.size(); ++q) diff[q] = t.t[q] - 0.5 * cov[q];
  // t is symmetric in (i, j) only up to rounding; symmetrize that pair first
  std::vector<double> diff_sym(diff.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        diff_sym[static_cast<std::size_t>((i * n + j) * n + k)] =
            0.5 * (diff[static_cast<std::size_t>((i * n + j) * n + k)] +
                   diff[static_cast<std::size_t>((j * n + i) * n + k)]);
        out.symmetry = std::max(out.symmetry, std::abs(t(i, j, k) - t(j, i, k)));
      }
    }
  }
  out.symmetrization = symmetrized_max(diff_sym, n);
  for (int i = 0; i < n; ++i) {
    double tr = 0.0;
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) tr += gc.ginv(j, k) * t(i, j, k);
    }
    out.trace = std::max(out.trace, std::abs(tr - a[i]));
    for (int j = 0; j < n; ++j) {
      double s = h.hessian(i, j);
      for (int k = 0; k < n; ++k) s += t(i, j, k) * h.gradient[k];
      out.normal = std::max(out.normal, std::abs(s));
    }
  }
  return out;
}

double obata_residual(const Vec& v, const Vec& p) {
  const GnomonicChart chart = centered_chart(p);
  const MetricField round = round_metric(chart.n());
  const HeightDerivatives h = height_derivatives(round, v, chart);
  const Mat g = round.in_frame(p, chart.frame());
  return (h.hessian + p.dot(v) * g).cwiseAbs().maxCoeff();
}

double equivariance_residual(const CurvatureTensor& r, const GroupElement& t, int samples,
                             std::uint64_t seed) {
  if (t.n() != r.n()) throw DimensionError("group element and tensor dimensions differ");
  CorrespondenceOptions opts;
  opts.allow_degenerate = true;
  const MetricField g = metric_from_curv(r, opts);
  const MetricField gt = metric_from_curv(act(r, t), opts);
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec p = rng.unit(r.dim());
    const Mat e = tangent_frame(p);
    Mat pushed(e.rows(), e.cols());
    for (Eigen::Index c = 0; c < e.cols(); ++c) pushed.col(c) = dphi_T(t, p, e.col(c));
    const Mat pulled = g.in_frame(phi_T(t, p), pushed);
    const Mat direct = gt.in_frame(p, e);
    worst = std::max(worst, (pulled - direct).cwiseAbs().maxCoeff());
  }
  return worst;
}

double antipodal_residual(const MetricField& g, int samples, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec p = rng.unit(g.n() + 1);
    const Mat e = tangent_frame(p);
    // d(-id) maps the frame e at p to -e at -p
    const Mat at_p = g.in_frame(p, e);
    const Mat at_minus = g.in_frame(-p, -e);
    worst = std::max(worst, (at_p - at_minus).cwiseAbs().maxCoeff());
  }
  return worst;
}

double stabilizer_residual(const CurvatureTensor& r, const GroupElement& t) {
  return act(r, t).max_abs_diff(r);
}

std::vector<Vec> equator_samples(const Equator& v, int count, std::uint64_t seed, const Vec& focus,
                                 double near_radius) {
  const auto m = v.normal().size();
  const Vec f = focus.size() == m ? focus : Vec(Vec::Unit(m, 0));
  Vec q = f - f.dot(v.normal()) * v.normal();
  if (q.norm() < 1e-8) q = v.span().col(0);
  q.normalize();
  Mat fixed(m, 2);
  fixed << v.normal(), q;
  Rng rng(seed);
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) {
    const Vec u = rng.unit_orthogonal(fixed);
    const double radius = (i % 2 == 1) ? near_radius : kPi;
    const double t = rng.uniform(-radius, radius);
    out.push_back(std::cos(t) * q + std::sin(t) * u);
  }
  return out;
}

bool VerificationReport::pass() const {
  for (const auto& [name, check] : checks) {
    if (!check.pass()) return false;
  }
  return true;
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["seed"] = seed;
  j["pass"] = pass();
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [name, check] : checks) {
    c[name] = {{"residual", check.residual},
               {"tolerance", check.tolerance},
               {"samples", check.samples},
               {"seed", check.seed},
               {"pass", check.pass()}};
  }
  j["checks"] = c;
  return j.dump(2);
}

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> tolerances = {
      {"positivity", 0.0},          {"roundtrip", 1e-8},  {"mean_curvature", 1e-6},
      {"killing_constancy", 1e-10}, {"metric_equation", 1e-6}, {"equivariance", 1e-8},
      {"antipodal", 1e-12},
  };
  return tolerances;
}

double VerifyOptions::tolerance(const std::string& check) const {
  if (const auto it = tolerances.find(check); it != tolerances.end()) return it->second;
  return default_tolerances().at(check);
}

namespace {

void add_check(VerificationReport& report, const VerifyOptions& opts, const std::string& name,
               double residual, int samples, std::uint64_t seed) {
  report.checks[name] = CheckResult{residual, opts.tolerance(name), samples, seed};
}

void common_checks(VerificationReport& report, const MetricField& g, const VerifyOptions& opts) {
  const int m = g.n() + 1;

  // mean curvature over equators x points, max-reduced
  std::vector<double> worst(static_cast<std::size_t>(opts.equators), 0.0);
  const std::uint64_t hseed = opts.seed + 11;
  parallel_for(opts.equators, [&](int e) {
    Rng rng(hseed + static_cast<std::uint64_t>(e));
    const Equator v(rng.unit(m));
    for (const Vec& p : equator_samples(v, opts.points, hseed + 1000 + static_cast<std::uint64_t>(e))) {
      worst[static_cast<std::size_t>(e)] =
          std::max(worst[static_cast<std::size_t>(e)], std::abs(mean_curvature_equator(g, v, p)));
    }
  });
  add_check(report, opts, "mean_curvature", *std::max_element(worst.begin(), worst.end()),
            opts.equators * opts.points, hseed);

  // Killing constancy of k_g: random circles plus circles through e_0
  ConstancyOptions cons;
  cons.circles = std::max(1, opts.circles / 2);
  cons.seed = opts.seed + 23;
  double constancy = killing_from_metric(g, cons).constancy_residual;
  cons.focus = Vec::Unit(m, 0);
  constancy = std::max(constancy, killing_from_metric(g, cons).constancy_residual);
  add_check(report, opts, "killing_constancy", constancy, 2 * cons.circles * cons.samples, cons.seed);

  Rng rng(opts.seed + 37);
  std::vector<double> eq(static_cast<std::size_t>(opts.samples), 0.0);
  std::vector<Vec> points;
  for (int s = 0; s < opts.samples; ++s) {
    // alternate uniform points with points near e_0
    Vec p = rng.unit(m);
    if (s % 2 == 1) p = (Vec::Unit(m, 0) + 0.2 * rng.gaussian(m)).normalized();
    points.push_back(p);
  }
  parallel_for(opts.samples, [&](int s) {
    const GnomonicChart chart(SpherePoint(points[static_cast<std::size_t>(s)]));
    eq[static_cast<std::size_t>(s)] = metric_equation_residual(g, chart, Vec::Zero(g.n()));
  });
  add_check(report, opts, "metric_equation", *std::max_element(eq.begin(), eq.end()), opts.samples,
            opts.seed + 37);

  add_check(report, opts, "antipodal", antipodal_residual(g, opts.samples, opts.seed + 41),
            opts.samples, opts.seed + 41);
}

}  // namespace

VerificationReport verify_tensor(const CurvatureTensor& r, const VerifyOptions& opts) {
  VerificationReport report;
  report.seed = opts.seed;
  const PositivityProbe probe = is_positive(r, 1e-6, ProbeOptions{12, 400, opts.seed});
  add_check(report, opts, "positivity", std::max(0.0, 1e-6 - probe.min_value), 12, opts.seed);
  if (!probe.positive) return report;

  CorrespondenceOptions copts;
  copts.allow_degenerate = true;
  const MetricField g = metric_from_curv(r, copts);

  const MetricKilling k = killing_from_metric(g, ConstancyOptions{4, 8, opts.seed + 3, {}});
  const Recovery rec = curv_from_killing(k.field, RecoveryOptions{opts.seed + 5, 4});
  add_check(report, opts, "roundtrip", rec.tensor.max_abs_diff(r), rec.samples, opts.seed + 5);

  common_checks(report, g, opts);

  Rng rng(opts.seed + 43);
  double equiv = 0.0;
  const int pairs = 4;
  for (int i = 0; i < pairs; ++i) {
    const GroupElement t(random_group_matrix(rng, r.dim()));
    equiv = std::max(equiv, equivariance_residual(r, t, std::max(1, opts.samples / pairs),
                                                  opts.seed + 47 + static_cast<std::uint64_t>(i)));
  }
  add_check(report, opts, "equivariance", equiv, opts.samples, opts.seed + 43);
  return report;
}

VerificationReport verify_metric(const MetricField& g, const VerifyOptions& opts) {
  VerificationReport report;
  report.seed = opts.seed;
  common_checks(report, g, opts);
  return report;
}

}  // namespace eqf
