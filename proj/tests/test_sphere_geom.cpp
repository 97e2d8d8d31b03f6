#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "eqf/errors.hpp"
#include "eqf/sphere_geom.hpp"
#include "support.hpp"

namespace eqf {
namespace {

double orthonormality_residual(const Mat& frame, const Vec& p) {
  const Mat gram = frame.transpose() * frame - Mat::Identity(frame.cols(), frame.cols());
  return std::max(gram.cwiseAbs().maxCoeff(), (frame.transpose() * p).cwiseAbs().maxCoeff());
}

TEST(SphereGeom, TangentFrameAtPole) {
  const Mat f = tangent_frame(Vec::Unit(3, 0));
  ASSERT_EQ(f.cols(), 2);
  EXPECT_LE((f.col(0) - Vec::Unit(3, 1)).norm(), 1e-15);
  EXPECT_LE((f.col(1) - Vec::Unit(3, 2)).norm(), 1e-15);
}

TEST(SphereGeom, TangentFrameOrthonormal) {
  Vec p(3);
  p << 1, 1, 0;
  p /= std::sqrt(2.0);
  EXPECT_LE(orthonormality_residual(tangent_frame(p), p), 1e-14);
  Rng rng(1);
  for (int s = 0; s < 200; ++s) {
    const Vec q = rng.unit(2 + s % 5);
    EXPECT_LE(orthonormality_residual(tangent_frame(q), q), 1e-14);
  }
}

TEST(SphereGeom, SpherePointRejectsNonUnit) {
  EXPECT_THROW(SpherePoint(Vec::Constant(3, 1.0)), DomainError);
}

TEST(SphereGeom, GreatCircleSpecialTimes) {
  const Vec p = Vec::Unit(4, 0);
  const Vec u = Vec::Unit(4, 1);
  auto [x0, v0] = great_circle(p, u, 0.0);
  EXPECT_LE((x0 - p).norm(), 1e-15);
  EXPECT_LE((v0 - u).norm(), 1e-15);
  auto [xpi, vpi] = great_circle(p, u, M_PI);
  EXPECT_LE((xpi + p).norm(), 1e-15);
  EXPECT_LE((vpi + u).norm(), 1e-15);
  auto [xh, vh] = great_circle(p, u, M_PI / 2);
  EXPECT_LE((xh - u).norm(), 1e-15);
  EXPECT_LE((vh + p).norm(), 1e-15);
}

TEST(SphereGeom, GreatCircleStaysOnSphere) {
  Rng rng(2);
  for (int s = 0; s < 1000; ++s) {
    const Vec p = rng.unit(4);
    const Vec u = test::random_tangent(p, rng);
    const auto [x, v] = great_circle(p, u, rng.uniform(-10, 10));
    EXPECT_NEAR(x.norm(), 1.0, 1e-12);
    EXPECT_LE(std::abs(x.dot(v)), 1e-12);
  }
}

TEST(SphereGeom, GreatCircleRejectsNonTangent) {
  EXPECT_THROW(great_circle(Vec::Unit(3, 0), Vec::Unit(3, 0), 0.1), DomainError);
}

TEST(SphereGeom, PhiTExamples) {
  Rng rng(3);
  const Vec p = rng.unit(4);
  EXPECT_LE((phi_T(GroupElement::identity(3), p) - p).norm(), 1e-15);
  Mat d = Mat::Identity(4, 4);
  d(0, 0) = 2;
  const GroupElement t(d);
  EXPECT_LE((phi_T(t, Vec::Unit(4, 0)) - Vec::Unit(4, 0)).norm(), 1e-15);
  Vec q = Vec::Zero(4);
  q << 1, 1, 0, 0;
  Vec expected(4);
  expected << 2, 1, 0, 0;
  EXPECT_LE((phi_T(t, q / std::sqrt(2.0)) - expected / std::sqrt(5.0)).norm(), 1e-15);
}

TEST(SphereGeom, PhiTMapsEquatorsToEquators) {
  Rng rng(4);
  for (int s = 0; s < 1000; ++s) {
    const GroupElement t(test::random_invertible(4, rng));
    const Equator v(rng.unit(4));
    const Equator image(t.matrix().inverse().transpose() * v.normal());
    const Vec x = v.span() * rng.unit(3);
    EXPECT_LE(std::abs(phi_T(t, x).dot(image.normal())), 1e-10);
  }
}

TEST(SphereGeom, DphiIdentityAndOrthogonal) {
  Rng rng(5);
  const Vec p = rng.unit(4);
  const Vec w = test::random_tangent(p, rng);
  EXPECT_LE((dphi_T(GroupElement::identity(3), p, w) - w).norm(), 1e-15);
  const Mat q = test::random_orthogonal(4, rng);
  EXPECT_LE((dphi_T(GroupElement(q), p, w) - q * w).norm(), 1e-14);
}

TEST(SphereGeom, DphiMatchesFiniteDifferences) {
  Rng rng(6);
  const double h = 1e-4;
  for (int s = 0; s < 100; ++s) {
    const GroupElement t(test::random_invertible(4, rng));
    const Vec p = rng.unit(4);
    const Vec w = test::random_tangent(p, rng);
    const Vec fd = (phi_T(t, great_circle(p, w, h).first) - phi_T(t, great_circle(p, w, -h).first)) / (2 * h);
    EXPECT_LE((dphi_T(t, p, w) - fd).norm(), 1e-6);
  }
}

// |det| of dphi between round-orthonormal frames, raised to 4/(n+1).
double frame_gram_density(const GroupElement& t, const Vec& p) {
  const int n = t.n();
  const Mat e = tangent_frame(p);
  Mat image(n + 1, n);
  for (int i = 0; i < n; ++i) image.col(i) = dphi_T(t, p, e.col(i));
  const double volume = std::sqrt((image.transpose() * image).determinant());
  return std::pow(volume, 4.0 / (n + 1));
}

TEST(SphereGeom, JacobianDensityExamples) {
  Rng rng(7);
  const Vec p = rng.unit(4);
  EXPECT_NEAR(jacobian_density(GroupElement(test::random_orthogonal(4, rng)), p), 1.0, 1e-14);
  EXPECT_NEAR(jacobian_density(GroupElement(2.0 * Mat::Identity(4, 4)), p), 1.0, 1e-14);
  Mat d = Mat::Identity(4, 4);
  d(0, 0) = 2;
  EXPECT_NEAR(jacobian_density(GroupElement(d), Vec::Unit(4, 0)), 0.125, 1e-15);
  EXPECT_NEAR(frame_gram_density(GroupElement(d), Vec::Unit(4, 0)), 0.125, 1e-14);
}

TEST(SphereGeom, JacobianDensityMatchesFrameGram) {
  Rng rng(8);
  for (int n : {2, 3, 5}) {
    for (int s = 0; s < 50; ++s) {
      const GroupElement t(test::random_invertible(n + 1, rng));
      const Vec p = rng.unit(n + 1);
      EXPECT_NEAR(jacobian_density(t, p), frame_gram_density(t, p), 1e-8);
    }
  }
}

TEST(SphereGeom, GnomonicChartRoundTrip) {
  Rng rng(9);
  const GnomonicChart chart(SpherePoint::normalized(rng.gaussian(4)));
  for (int s = 0; s < 100; ++s) {
    const Vec x = rng.gaussian(3);
    const Vec p = chart.point(x);
    EXPECT_NEAR(p.norm(), 1.0, 1e-14);
    EXPECT_LE((chart.coordinates(p) - x).norm(), 1e-12);
  }
  EXPECT_THROW(chart.point(Vec::Constant(3, 20.0)), DomainError);
}

TEST(SphereGeom, GnomonicChartMapsLinesToGreatCircles) {
  Rng rng(10);
  const GnomonicChart chart(SpherePoint::normalized(rng.gaussian(4)));
  const Vec a = rng.gaussian(3);
  const Vec b = rng.gaussian(3);
  // Points on the chart line x = a + s b lie in the 2-plane spanned by p(a), p(a+b).
  Mat plane(4, 2);
  plane << chart.point(a), chart.point(a + b);
  for (double s : {-1.0, 0.3, 2.5}) {
    const Vec p = chart.point(a + s * b);
    const Vec coeff = plane.colPivHouseholderQr().solve(p);
    EXPECT_LE((plane * coeff - p).norm(), 1e-12);
  }
}

TEST(SphereGeom, PointJetMatchesFiniteDifferences) {
  Rng rng(11);
  const GnomonicChart chart(SpherePoint::normalized(rng.gaussian(4)));
  const Vec x = 0.5 * rng.gaussian(3);
  const auto jet = point_jet(chart, x);
  const auto vecs = coordinate_vector_jets(chart, x);
  const double h = 1e-4;
  for (int i = 0; i < 3; ++i) {
    const Vec e = Vec::Unit(3, i) * h;
    const Vec d1 = (chart.point(x + e) - chart.point(x - e)) / (2 * h);
    for (int c = 0; c < 4; ++c) {
      EXPECT_NEAR(jet[static_cast<std::size_t>(c)].grad(i), d1(c), 1e-7);
      EXPECT_NEAR(vecs[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].value(), d1(c), 1e-7);
    }
    for (int j = 0; j < 3; ++j) {
      const Vec f = Vec::Unit(3, j) * h;
      const Vec d2 = (chart.point(x + e + f) - chart.point(x + e - f) - chart.point(x - e + f) +
                      chart.point(x - e - f)) / (4 * h * h);
      for (int c = 0; c < 4; ++c) {
        EXPECT_NEAR(jet[static_cast<std::size_t>(c)].hess(i, j), d2(c), 1e-5);
      }
    }
  }
}

TEST(SphereGeom, GaussLegendreExactForPolynomials) {
  const auto [x, w] = gauss_legendre(10);
  for (int k = 0; k <= 19; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += w[i] * std::pow(x[i], k);
    const double exact = k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
    EXPECT_NEAR(sum, exact, 1e-14) << "k=" << k;
  }
}

TEST(SphereGeom, EquatorQuadratureRoundIntegrals) {
  Rng rng(12);
  for (int s = 0; s < 10; ++s) {
    const Equator v(rng.unit(4));
    const auto rule = equator_quadrature(v, 16);
    EXPECT_FALSE(rule.monte_carlo);
    EXPECT_NEAR(integrate(rule, [](const Vec&) { return 1.0; }).value, 4 * M_PI, 1e-10);
    const Vec w = v.span() * rng.unit(3);
    EXPECT_NEAR(integrate(rule, [&](const Vec& x) { return x.dot(w); }).value, 0.0, 1e-10);
    const Vec a = v.span().col(0);
    const Vec b = v.span().col(1);
    auto y2 = [&](const Vec& x) { return std::pow(x.dot(a), 2) - std::pow(x.dot(b), 2); };
    EXPECT_NEAR(integrate(rule, y2).value, 0.0, 1e-8);
  }
}

TEST(SphereGeom, EquatorHarmonicAgreesWithDenseSampling) {
  Rng rng(13);
  const Equator v(rng.unit(4));
  const Vec a = v.span().col(0);
  const Vec c = v.span().col(2);
  auto f = [&](const Vec& x) { return 3 * std::pow(x.dot(c), 2) - 1 + x.dot(a); };
  const double quad = integrate(equator_quadrature(v, 16), f).value;
  double mc = 0.0;
  const int samples = 200000;
  for (int s = 0; s < samples; ++s) mc += f(v.span() * rng.unit(3));
  mc *= 4 * M_PI / samples;
  EXPECT_NEAR(quad, 0.0, 1e-8);
  EXPECT_NEAR(mc, quad, 0.05);
}

TEST(SphereGeom, CircleEquatorRule) {
  const Equator v(Vec::Unit(3, 2));
  const auto rule = equator_quadrature(v, 16);
  EXPECT_NEAR(integrate(rule, [](const Vec&) { return 1.0; }).value, 2 * M_PI, 1e-12);
  EXPECT_NEAR(integrate(rule, [](const Vec& x) { return x(0) * x(0); }).value, M_PI, 1e-12);
}

TEST(SphereGeom, SphereQuadratureRoundIntegrals) {
  for (int n : {2, 3}) {
    const auto rule = sphere_quadrature(n, 16);
    const double vol = sphere_volume(n);
    EXPECT_NEAR(integrate(rule, [](const Vec&) { return 1.0; }).value, vol, 1e-8 * vol);
    EXPECT_NEAR(integrate(rule, [](const Vec& x) { return x(0) + x(1) * x(1) * x(2); }).value, 0.0, 1e-10);
    EXPECT_NEAR(integrate(rule, [](const Vec& x) { return x(0) * x(0); }).value, vol / (n + 1), 1e-8);
  }
  EXPECT_NEAR(sphere_volume(3), 2 * M_PI * M_PI, 1e-14);
}

// Integral of exp(<a, x>) over S^n: (2 pi)^((n+1)/2) I_((n-1)/2)(|a|) / |a|^((n-1)/2).
TEST(SphereGeom, SphereQuadratureExponentialClosedForm) {
  Rng rng(15);
  for (int n : {2, 3}) {
    const Vec a = 1.5 * rng.unit(n + 1);
    const double nu = (n - 1) / 2.0;
    const double exact = std::pow(2 * M_PI, (n + 1) / 2.0) * std::cyl_bessel_i(nu, 1.5) / std::pow(1.5, nu);
    const double quad = integrate(sphere_quadrature(n, 16), [&](const Vec& x) { return std::exp(a.dot(x)); }).value;
    EXPECT_NEAR(quad, exact, 1e-10 * exact) << "n=" << n;
    const double mixed = integrate(sphere_quadrature(n, 16), [n](const Vec& x) { return std::pow(x(1) * x(n), 2); }).value;
    // <x_1^2 x_n^2> = 1 / ((n+1)(n+3)) on S^n.
    EXPECT_NEAR(mixed, sphere_volume(n) / ((n + 1) * (n + 3)), 1e-12) << "n=" << n;
  }
}

TEST(SphereGeom, SquaredCoordinateAgreesWithMonteCarlo) {
  Rng rng(14);
  const int samples = 200000;
  double mc = 0.0;
  for (int s = 0; s < samples; ++s) mc += std::pow(rng.unit(4)(0), 2);
  mc *= sphere_volume(3) / samples;
  const double quad = integrate(sphere_quadrature(3, 16), [](const Vec& x) { return x(0) * x(0); }).value;
  EXPECT_NEAR(quad, mc, 0.02 * quad);
}

TEST(SphereGeom, MonteCarloRuleHigherDimension) {
  const auto rule = sphere_quadrature(5, 60, 3);
  EXPECT_TRUE(rule.monte_carlo);
  const auto one = integrate(rule, [](const Vec&) { return 1.0; });
  EXPECT_NEAR(one.value, sphere_volume(5), 1e-10);
  const auto sq = integrate(rule, [](const Vec& x) { return x(0) * x(0); });
  EXPECT_NEAR(sq.value, sphere_volume(5) / 6, 5 * sq.standard_error + 1e-12);
  EXPECT_GT(sq.standard_error, 0.0);
}

TEST(SphereGeom, QuadratureCsvShape) {
  const auto rule = sphere_quadrature(2, 4);
  const std::string csv = quadrature_csv(rule);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x0,x1,x2,weight");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(rule.nodes.size()));
}

}  // namespace
}  // namespace eqf
