#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "eqf/errors.hpp"
#include "eqf/killing_field.hpp"
#include "eqf/tensor_core.hpp"
#include "support.hpp"

namespace eqf {
namespace {

// Dimension of the solution space of the linear symmetry constraints, computed
// by rank of the full constraint system on raw coefficient arrays.
int constraint_nullity(int n) {
  const int d = n + 1;
  const int size = d * d * d * d;
  auto idx = [d](int i, int j, int k, int l) { return ((i * d + j) * d + k) * d + l; };
  Mat c = Mat::Zero(4 * size, size);
  int row = 0;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int l = 0; l < d; ++l) {
          c(row, idx(i, j, k, l)) += 1;
          c(row++, idx(j, i, k, l)) += 1;
          c(row, idx(i, j, k, l)) += 1;
          c(row++, idx(i, j, l, k)) += 1;
          c(row, idx(i, j, k, l)) += 1;
          c(row++, idx(k, l, i, j)) -= 1;
          c(row, idx(i, j, k, l)) += 1;
          c(row, idx(i, k, l, j)) += 1;
          c(row++, idx(i, l, j, k)) += 1;
        }
      }
    }
  }
  Eigen::FullPivLU<Mat> lu(c);
  lu.setThreshold(1e-10);
  return size - static_cast<int>(lu.rank());
}

TEST(TensorCore, ValidateRoundTensorHasZeroResiduals) {
  const auto r = constant_curvature(2, 1.0);
  const auto res = validate(2, r.coeffs());
  EXPECT_EQ(res.antisym_first, 0.0);
  EXPECT_EQ(res.antisym_second, 0.0);
  EXPECT_EQ(res.pair, 0.0);
  EXPECT_EQ(res.bianchi, 0.0);
}

TEST(TensorCore, ValidateDetectsBrokenAntisymmetry) {
  std::vector<double> raw(81, 0.0);
  raw[(0 * 3 + 1) * 9 + 0 * 3 + 1] = 1.0;
  EXPECT_GT(validate(2, raw).antisym_first, 0.5);
}

TEST(TensorCore, ValidateRejectsWrongSize) {
  std::vector<double> raw(80, 0.0);
  EXPECT_THROW(validate(2, raw), DimensionError);
}

TEST(TensorCore, FubiniStudyIsAlgebraic) {
  EXPECT_LE(validate(5, fubini_study(2).coeffs()).max(), 1e-15);
}

TEST(TensorCore, BasisDimensionMatchesConstraintNullity) {
  EXPECT_EQ(curv_dimension(2), 6);
  EXPECT_EQ(curv_dimension(3), 20);
  EXPECT_EQ(curv_dimension(4), 50);
  for (int n : {2, 3, 4}) {
    EXPECT_EQ(static_cast<int>(curv_basis(n).size()), constraint_nullity(n)) << "n=" << n;
  }
}

TEST(TensorCore, BasisElementsAreValid) {
  for (const auto& b : curv_basis(3)) EXPECT_LE(validate(3, b.coeffs()).max(), 1e-12);
}

TEST(TensorCore, ProjectionReconstructsValidatedTensors) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto r = random_direction(3, seed);
    const auto back = from_basis_coordinates(3, basis_coordinates(r));
    EXPECT_LE(back.max_abs_diff(r), 1e-10);
  }
}

TEST(TensorCore, RoundSectionalIsOne) {
  const auto r = constant_curvature(3, 1.0);
  Rng rng(3);
  for (int s = 0; s < 50; ++s) {
    EXPECT_NEAR(sectional(r, rng.gaussian(4), rng.gaussian(4)), 1.0, 1e-12);
  }
}

TEST(TensorCore, FubiniStudyHolomorphicAndTotallyRealPlanes) {
  const auto r = fubini_study(2);
  const Mat j = complex_structure(6);
  Rng rng(11);
  for (int s = 0; s < 20; ++s) {
    const Vec p = rng.unit(6);
    EXPECT_NEAR(sectional(r, p, j * p), 4.0, 1e-12);
    Vec y = rng.gaussian(6);
    y -= y.dot(p) * p + y.dot(j * p) * (j * p);
    EXPECT_NEAR(sectional(r, p, y), 1.0, 1e-12);
  }
}

TEST(TensorCore, SectionalIndependentOfPlaneBasis) {
  const auto r = random_direction(3, 5);
  Rng rng(6);
  for (int s = 0; s < 100; ++s) {
    const Vec x = rng.gaussian(4);
    const Vec y = rng.gaussian(4);
    Eigen::Matrix2d m;
    do {
      m << rng.normal(), rng.normal(), rng.normal(), rng.normal();
    } while (std::abs(m.determinant()) < 0.1);
    const double a = sectional(r, x, y);
    const double b = sectional(r, m(0, 0) * x + m(0, 1) * y, m(1, 0) * x + m(1, 1) * y);
    EXPECT_NEAR(a, b, 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST(TensorCore, ConstantCurvatureValues) {
  EXPECT_EQ(constant_curvature(3, 0.0).max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(constant_curvature(2, 2.0)(0, 1, 0, 1), 2.0);
}

TEST(TensorCore, SecMinEstimateClosedForms) {
  EXPECT_NEAR(sec_min_estimate(constant_curvature(3, 1.0)).value, 1.0, 1e-8);
  EXPECT_NEAR(sec_min_estimate(fubini_study(2)).value, 1.0, 1e-6);
  EXPECT_NEAR(sec_min_estimate(fubini_study(3)).value, 1.0, 1e-6);
}

TEST(TensorCore, SecMinEstimateBelowBruteForce) {
  const auto r = constant_curvature(3, 1.0) + 0.5 * random_direction(3, 21);
  const auto est = sec_min_estimate(r);
  const double brute = test::brute_force_min_sectional(r, 100000, 22);
  EXPECT_GT(est.value, 0.0);
  EXPECT_LE(est.value, brute + 1e-9);
  EXPECT_NEAR(sectional(r, est.x, est.y), est.value, 1e-12);
}

TEST(TensorCore, PositivityProbe) {
  EXPECT_TRUE(is_positive(constant_curvature(3, 1.0), 0.5).positive);
  const auto neg = is_positive(constant_curvature(3, -1.0), 0.0);
  EXPECT_FALSE(neg.positive);
  EXPECT_NEAR(sectional(constant_curvature(3, -1.0), neg.x, neg.y), -1.0, 1e-12);
}

TEST(TensorCore, PositivityProbeAgreesWithPlaneSampling) {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const auto r = constant_curvature(3, 1.0) + 2.0 * random_direction(3, seed);
    const double brute = test::brute_force_min_sectional(r, 100000, seed + 100);
    const auto probe = is_positive(r, 0.0);
    EXPECT_LE(probe.min_value, brute + 1e-9);
    if (brute < -1e-3) {
      EXPECT_FALSE(probe.positive);
    }
    if (probe.positive) {
      EXPECT_GT(brute, 0.0);
    }
  }
}

TEST(TensorCore, ActionByScalarsAndIdentity) {
  const auto r = random_direction(3, 8);
  EXPECT_EQ(act(r, GroupElement::identity(3)).max_abs_diff(r), 0.0);
  EXPECT_EQ(act(r, GroupElement(-Mat::Identity(4, 4))).max_abs_diff(r), 0.0);
  EXPECT_LE(act(r, GroupElement(3.0 * Mat::Identity(4, 4))).max_abs_diff(r), 1e-13);
}

TEST(TensorCore, ActionIsRightAction) {
  Rng rng(9);
  for (int s = 0; s < 10; ++s) {
    const auto r = random_direction(3, 30 + s);
    const GroupElement t1(test::random_invertible(4, rng));
    const GroupElement t2(test::random_invertible(4, rng));
    EXPECT_LE(act(act(r, t1), t2).max_abs_diff(act(r, t1 * t2)), 1e-10);
  }
}

TEST(TensorCore, ActionPreservesSymmetries) {
  Rng rng(10);
  const auto r = act(random_direction(4, 2), GroupElement(test::random_invertible(5, rng)));
  EXPECT_LE(validate(4, r.coeffs()).max(), 1e-12);
}

TEST(TensorCore, SingularGroupElementRejected) {
  Mat m = Mat::Identity(4, 4);
  m(2, 2) = 0.0;
  EXPECT_THROW(GroupElement{m}, DomainError);
}

TEST(TensorCore, SymProductAtFixedAxisVanishes) {
  const auto k = SkewMatrix::elementary(2, 0, 1);
  const auto field = sym_product(k, k);
  const Vec p = Vec::Unit(3, 2);
  EXPECT_NEAR(field(p, Vec::Unit(3, 0), Vec::Unit(3, 0)), 0.0, 1e-15);
  EXPECT_NEAR(field(p, Vec::Unit(3, 1), Vec::Unit(3, 0)), 0.0, 1e-15);
}

TEST(TensorCore, SymProductQuaternionic) {
  Mat li = Mat::Zero(4, 4);
  li(1, 0) = 1;
  li(0, 1) = -1;
  li(3, 2) = 1;
  li(2, 3) = -1;
  const SkewMatrix l(li);
  const auto field = sym_product(l, l);
  const Vec p = Vec::Unit(4, 0);
  const Vec ip = li * p;
  EXPECT_NEAR(field(p, ip, ip), 2.0, 1e-15);
}

TEST(TensorCore, SymProductConstantAlongGreatCircles) {
  Rng rng(12);
  Mat a(4, 4), b(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      a(i, j) = rng.normal();
      b(i, j) = rng.normal();
    }
  }
  const auto field = sym_product(SkewMatrix(a - a.transpose()), SkewMatrix(b - b.transpose()));
  for (int c = 0; c < 20; ++c) {
    const Vec p = rng.unit(4);
    const Vec u = test::random_tangent(p, rng);
    double lo = 1e300, hi = -1e300;
    for (int s = 0; s < 100; ++s) {
      const double t = 2 * M_PI * s / 100;
      const auto [x, xdot] = great_circle(p, u, t);
      const double value = field(x, xdot, xdot);
      lo = std::min(lo, value);
      hi = std::max(hi, value);
    }
    EXPECT_LE(hi - lo, 1e-12);
  }
}

}  // namespace
}  // namespace eqf
