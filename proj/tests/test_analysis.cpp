#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "eqf/analysis.hpp"
#include "eqf/correspondence.hpp"
#include "eqf/errors.hpp"
#include "eqf/verification.hpp"
#include "support.hpp"

namespace eqf {
namespace {

MetricField random_metric(std::uint64_t seed, double eps = 0.5) {
  return metric_from_curv(random_positive(3, seed, eps).tensor);
}

double relative_spread(const std::vector<double>& values) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return (*hi - *lo) / *hi;
}

std::vector<double> areas(const MetricField& g, int count, int order, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(equator_area(g, Equator(rng.unit(4)), order).value);
  return out;
}

TEST(Analysis, HarmonicCount) {
  EXPECT_EQ(harmonic_count(0), 1);
  EXPECT_EQ(harmonic_count(8), 81);
}

TEST(Analysis, LowDegreeHarmonicsClosedForm) {
  const std::vector<double> theta{0.3, 1.2, 2.9};
  const std::vector<double> phi{0.1, 2.0, 5.5};
  const auto h = spherical_harmonics(2, theta, phi);
  const double c0 = 1 / std::sqrt(4 * M_PI);
  const double c1 = std::sqrt(3 / (4 * M_PI));
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    EXPECT_NEAR(h.value(r, 0), c0, 1e-15);
    EXPECT_NEAR(h.value(r, 1), c1 * std::cos(theta[k]), 1e-14);
    EXPECT_NEAR(std::abs(h.value(r, 2)), c1 * std::sin(theta[k]) * std::abs(std::cos(phi[k])), 1e-14);
    EXPECT_NEAR(std::abs(h.value(r, 3)), c1 * std::sin(theta[k]) * std::abs(std::sin(phi[k])), 1e-14);
  }
}

TEST(Analysis, HarmonicDerivativesMatchFiniteDifferences) {
  const std::vector<double> theta{0.4, 1.1, 2.5};
  const std::vector<double> phi{0.7, 3.0, 4.4};
  const double h = 1e-6;
  auto shifted = [&](double dt, double dp) {
    std::vector<double> t = theta, p = phi;
    for (auto& x : t) x += dt;
    for (auto& x : p) x += dp;
    return spherical_harmonics(6, t, p).value;
  };
  const auto base = spherical_harmonics(6, theta, phi);
  const Mat dtheta = (shifted(h, 0) - shifted(-h, 0)) / (2 * h);
  const Mat dphi = (shifted(0, h) - shifted(0, -h)) / (2 * h);
  EXPECT_LE((base.d_theta - dtheta).cwiseAbs().maxCoeff(), 1e-7);
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    EXPECT_LE((base.d_phi_over_sin.row(r) * std::sin(theta[k]) - dphi.row(r)).cwiseAbs().maxCoeff(), 1e-7);
  }
}

TEST(Analysis, RoundMassMatrixIsIdentity) {
  const JacobiGalerkin jg(round_metric(3), Equator(Vec::Unit(4, 3)), 6);
  EXPECT_LE((jg.mass() - Mat::Identity(jg.size(), jg.size())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Analysis, RoundEquatorArea) {
  for (double a : areas(round_metric(3), 10, 32, 1)) EXPECT_NEAR(a, 4 * M_PI, 1e-8);
}

TEST(Analysis, EqualAreasForTensorMetrics) {
  for (std::uint64_t seed : {2u, 3u}) {
    const auto g = random_metric(seed);
    const auto a32 = areas(g, 100, 32, seed);
    EXPECT_LE(relative_spread(a32), 1e-5);
    // Quadrature error estimate from a doubled order on a few equators.
    const auto a64 = areas(g, 5, 64, seed);
    double err = 0.0;
    for (std::size_t i = 0; i < a64.size(); ++i) err = std::max(err, std::abs(a64[i] - a32[i]) / a64[i]);
    EXPECT_LE(relative_spread(a32), 10 * std::max(err, 1e-14));
  }
}

TEST(Analysis, EqualAreasForLeftInvariantMetrics) {
  EXPECT_LE(relative_spread(areas(left_invariant_metric(1, 1, 4), 100, 32, 4)), 1e-5);
  EXPECT_LE(relative_spread(areas(left_invariant_metric(1, 2, 3), 100, 32, 5)), 1e-5);
}

TEST(Analysis, BumpMetricAreasDiffer) {
  EXPECT_GT(relative_spread(areas(bump_metric(3), 50, 32, 6)), 1e-4);
}

TEST(Analysis, SecondFundamentalFormRound) {
  Rng rng(7);
  const Equator v(rng.unit(4));
  for (const Vec& p : equator_samples(v, 5, 7)) {
    EXPECT_LE(second_fundamental_form(round_metric(3), v, p).form.cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Analysis, SecondFundamentalFormTracelessButNonzero) {
  const auto g = random_metric(8);
  Rng rng(8);
  double largest = 0.0;
  for (int e = 0; e < 5; ++e) {
    const Equator v(rng.unit(4));
    for (const Vec& p : equator_samples(v, 4, e)) {
      const auto a = second_fundamental_form(g, v, p);
      EXPECT_LE(std::abs(a.mean_curvature()), 1e-6);
      EXPECT_NEAR(a.mean_curvature(), mean_curvature_equator(g, v, p), 1e-8);
      largest = std::max(largest, std::sqrt(a.norm2()));
    }
  }
  EXPECT_GT(largest, 1e-4);
}

TEST(Analysis, SecondFundamentalFormMatchesFundamentalTensorRoute) {
  const auto g = random_metric(9);
  Rng rng(9);
  const Equator v(rng.unit(4));
  for (const Vec& p : equator_samples(v, 6, 9)) {
    const auto a = second_fundamental_form(g, v, p);
    const GnomonicChart chart{SpherePoint(p)};
    const auto hd = height_derivatives(g, v.normal(), chart);
    const Mat x = chart.frame().transpose() * a.frame;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const double via_t = -fundamental_tensor(g, chart, Vec::Zero(3), x.col(i), x.col(j), hd.gradient) /
                             hd.gradient_norm;
        EXPECT_NEAR(a.form(i, j), via_t, 1e-8);
      }
    }
  }
}

TEST(Analysis, JacobiOnRoundEquator) {
  const auto g = round_metric(3);
  const Equator v(Vec::Unit(4, 3));
  Vec one = Vec::Zero(1);
  one(0) = std::sqrt(4 * M_PI);
  for (double value : jacobi_apply(g, v, one, 4)) EXPECT_NEAR(value, 2.0, 1e-6);
  for (int k = 1; k <= 3; ++k) {
    const Vec c = Vec::Unit(4, k);
    for (double value : jacobi_apply(g, v, c, 4)) EXPECT_NEAR(value, 0.0, 1e-6);
  }
  EXPECT_THROW(jacobi_apply(g, v, Vec::Zero(30), 4), DomainError);
}

// Area of x -> normalize(x + s eta(x) N(x)) over Sigma_v, by Gauss-Legendre in
// (theta, phi) with finite-difference tangent vectors.
double perturbed_area(const MetricField& g, const Equator& v, const std::function<double(const Vec&)>& eta,
                      double s) {
  const int count = 40;
  const auto [gx, gw] = gauss_legendre(count);
  auto embed = [&](double theta, double phi) {
    Vec local(3);
    local << std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta);
    const Vec x = v.span() * local;
    const auto hd = height_derivatives(g, v.normal(), x);
    const Vec normal = hd.ambient_gradient() / hd.gradient_norm;
    return Vec((x + s * eta(x) * normal).normalized());
  };
  const double h = 1e-5;
  double total = 0.0;
  for (int a = 0; a < count; ++a) {
    const double theta = 0.5 * M_PI * (gx[static_cast<std::size_t>(a)] + 1);
    for (int b = 0; b < 2 * count; ++b) {
      const double phi = 2 * M_PI * b / (2 * count);
      const Vec y = embed(theta, phi);
      const Vec dt = (embed(theta + h, phi) - embed(theta - h, phi)) / (2 * h);
      const Vec dp = (embed(theta, phi + h) - embed(theta, phi - h)) / (2 * h);
      const Mat big = g.ambient(y);
      Eigen::Matrix2d m;
      m << dt.dot(big * dt), dt.dot(big * dp), dp.dot(big * dt), dp.dot(big * dp);
      total += 0.5 * M_PI * gw[static_cast<std::size_t>(a)] * (2 * M_PI / (2 * count)) * std::sqrt(m.determinant());
    }
  }
  return total;
}

TEST(Analysis, GalerkinFormMatchesSecondVariationOfArea) {
  const auto g = random_metric(10, 0.3);
  Rng rng(10);
  const Equator v(rng.unit(4));
  const Vec a = v.span().col(0);
  const Vec b = v.span().col(2);
  auto eta = [&](const Vec& x) { return 0.5 + x.dot(a) + 0.3 * x.dot(b); };
  const JacobiGalerkin jg(g, v, 1);
  std::vector<double> values;
  for (const Vec& x : jg.mesh().rule.nodes) values.push_back(eta(x));
  const Vec c = jg.project(values);
  const double form = c.dot(jg.stiffness() * c);
  const double s = 1e-2;
  const double second = (perturbed_area(g, v, eta, s) - 2 * perturbed_area(g, v, eta, 0.0) +
                         perturbed_area(g, v, eta, -s)) / (s * s);
  EXPECT_NEAR(form, second, 2e-3 * std::abs(form) + 1e-3);
}

TEST(Analysis, RoundSpectrum) {
  const auto probe = jacobi_spectrum_probe(round_metric(3), Equator(Vec::Unit(4, 3)), 8, 1e-6);
  EXPECT_EQ(probe.negative, 1);
  EXPECT_EQ(probe.near_zero, 3);
  EXPECT_NEAR(probe.eigenvalues(0), -2.0, 1e-4);
  // Closed form k(k + 1) - 2 with multiplicity 2k + 1.
  EXPECT_NEAR(probe.eigenvalues(4), 4.0, 1e-8);
  EXPECT_NEAR(probe.eigenvalues(9), 10.0, 1e-8);
}

TEST(Analysis, NearRoundSpectrumHasIndexOneNullityThree) {
  const auto g = metric_from_curv(constant_curvature(3, 1.0) + 0.2 * random_direction(3, 11));
  Rng rng(11);
  const auto probe = jacobi_spectrum_probe(g, Equator(rng.unit(4)), 12);
  EXPECT_EQ(probe.negative, 1);
  EXPECT_EQ(probe.near_zero, 3);
}

TEST(Analysis, RotationJacobiFunctions) {
  const auto g = random_metric(12, 0.3);
  Rng rng(12);
  const Equator v(rng.unit(4));
  const JacobiGalerkin jg(g, v, 12);
  const Mat w = tangent_frame(v.normal());
  for (int i = 0; i < 3; ++i) {
    const auto eta = rotation_jacobi_function(g, v, w.col(i));
    const auto out = jg.apply(eta);
    double sup = 0.0;
    for (double value : out) sup = std::max(sup, std::abs(value));
    EXPECT_LE(sup, 1e-3);
  }
  EXPECT_EQ(jg.rotation_jacobi_functions().size(), 3u);
}

TEST(Analysis, BergerEquatorsAreMinimal) {
  const auto g = left_invariant_metric(1, 1, 4);
  Rng rng(13);
  for (int e = 0; e < 20; ++e) {
    const Equator v(rng.unit(4));
    for (const Vec& p : equator_samples(v, 10, e)) EXPECT_LE(std::abs(mean_curvature_equator(g, v, p)), 1e-6);
  }
}

TEST(Analysis, LeftInvariantGeneratorReproducesMetric) {
  const auto g = left_invariant_metric(1, 2, 3);
  ASSERT_TRUE(g.generator().has_value());
  const auto from_tensor = metric_from_curv(*g.generator());
  Rng rng(14);
  for (int s = 0; s < 100; ++s) {
    const Vec p = rng.unit(4);
    const Vec x = test::random_tangent(p, rng);
    const Vec y = test::random_tangent(p, rng);
    EXPECT_NEAR(from_tensor(p, x, y), g(p, x, y), 1e-9);
  }
}

TEST(Analysis, QuaternionRelations) {
  const Mat i = quaternion_left(1), j = quaternion_left(2), k = quaternion_left(3);
  const Mat id = Mat::Identity(4, 4);
  EXPECT_LE((i * i + id).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((i * j - k).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((j * k - i).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE((i + i.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_THROW(quaternion_left(4), DomainError);
}

TEST(Analysis, RadonOfOneIsArea) {
  const auto g = random_metric(15);
  Rng rng(15);
  for (int e = 0; e < 5; ++e) {
    const Equator v(rng.unit(4));
    EXPECT_EQ(funk_radon(g, [](const Vec&) { return 1.0; }, v, 32).value, equator_area(g, v, 32).value);
  }
}

TEST(Analysis, RadonOfOddFunctionVanishes) {
  const auto g = random_metric(16);
  Rng rng(16);
  const Vec a = rng.gaussian(4);
  auto f = [&](const Vec& x) { return x.dot(a) * (1 + x(0) * x(0)) + std::pow(x(1), 3); };
  for (int e = 0; e < 5; ++e) EXPECT_NEAR(funk_radon(g, f, Equator(rng.unit(4)), 32).value, 0.0, 1e-8);
}

TEST(Analysis, RoundRadonAverage) {
  Rng rng(17);
  const auto g = round_metric(3);
  auto f = [](const Vec& x) { return std::exp(x(0)) + x(1) * x(1); };
  const int count = 1000;
  double mean = 0.0;
  for (int e = 0; e < count; ++e) mean += funk_radon(g, f, Equator(rng.unit(4)), 16).value;
  mean /= count;
  const double volume_integral = integrate(sphere_quadrature(3, 24), f).value;
  EXPECT_NEAR(mean, 4 * M_PI / (2 * M_PI * M_PI) * volume_integral, 1e-2 * std::abs(mean));
}

TEST(Analysis, CsvFormats) {
  const std::vector<Equator> eqs{Equator(Vec::Unit(4, 0))};
  const std::string csv = area_csv(eqs, {1.5});
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "v0,v1,v2,v3,area");
  Vec ev(2);
  ev << -2, 0;
  std::istringstream in(spectrum_csv(ev));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,eigenvalue");
  std::getline(in, line);
  EXPECT_EQ(line, "0,-2");
  EXPECT_THROW(area_csv(eqs, {}), DimensionError);
}

}  // namespace
}  // namespace eqf
