#include <gtest/gtest.h>

#include <random>

#include "lightcone/chart.hpp"
#include "lightcone/errors.hpp"
#include "lightcone/frame.hpp"
#include "oracles.hpp"

using namespace lightcone;

namespace {

ParamPoint pt(std::initializer_list<double> v) {
  ParamPoint a(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) a[i++] = x;
  return a;
}

double max_diff(const AmbientVector& a, const AmbientVector& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<ImmersionChart> catalog() {
  return {builtin("euclidean", 2), builtin("euclidean", 3), builtin("hs_product", 1), builtin("hs_product", 2),
          builtin("round_sphere", 2), builtin("round_sphere", 3)};
}

Box interior(const ImmersionChart& c) { return c.domain().shrunk(0.05 * c.domain().scale()); }

}  // namespace

TEST(Euclidean, JetAtOrigin) {
  const ImmersionChart c = builtin("euclidean", 2);
  const Jet2 j = c.jet(pt({0, 0}));
  EXPECT_EQ(j.value(), pt({0.5, -0.5, 0, 0}));
  EXPECT_EQ(j.d1(0), pt({0, 0, 1, 0}));
  EXPECT_EQ(j.d1(1), pt({0, 0, 0, 1}));
  EXPECT_EQ(j.d2(0, 0), pt({1, 1, 0, 0}));
  EXPECT_EQ(j.d2(1, 1), pt({1, 1, 0, 0}));
  EXPECT_EQ(j.d2(0, 1), pt({0, 0, 0, 0}));
}

TEST(Euclidean, JetAtUnitPoint) {
  const ImmersionChart c = builtin("euclidean", 2);
  const Jet2 j = c.jet(pt({1, 0}));
  EXPECT_EQ(j.value(), pt({1, 0, 1, 0}));
  EXPECT_EQ(j.d1(0), pt({1, 1, 1, 0}));
  const Jet2 f = c.with_fd_backend(1e-3).jet(pt({1, 0}));
  EXPECT_LT(max_diff(f.d1(0), j.d1(0)), 1e-10);
}

TEST(Jet2, HessianStoredOnce) {
  const Jet2 j = builtin("round_sphere", 2).jet(pt({0.1, 0.2}));
  EXPECT_EQ(&j.d2(0, 1), &j.d2(1, 0));
}

TEST(Builtin, HsProductAtOrigin) {
  EXPECT_LT(max_diff(builtin("hs_product", 1).value(pt({0, 0})), pt({1, 0, 1, 0})), 1e-15);
}

TEST(Builtin, RoundSphereNorthPole) {
  const AmbientVector p = builtin("round_sphere", 2).value(pt({0, 0}));
  EXPECT_LT(max_diff(p, pt({1, 0, 0, 1})), 1e-15);
  EXPECT_NEAR(oracle::minkowski(p, p), 0.0, 1e-15);
}

TEST(Builtin, UnknownNameIsConfigError) { EXPECT_THROW(builtin("torus", 2), ConfigError); }

TEST(Builtin, NamesAndDimensions) {
  const ImmersionChart hs = builtin("hyperbolic_sphere_product", 2);
  EXPECT_EQ(hs.n(), 4);
  EXPECT_EQ(hs.ambient_dim(), 6);
  EXPECT_EQ(hs.backend(), JetBackend::analytic);
}

TEST(Builtin, ImagesLieOnTheLightCone) {
  std::mt19937_64 rng(11);
  for (const auto& c : catalog()) {
    const Box b = c.domain();
    for (int k = 0; k < 200; ++k) {
      const AmbientVector p = c.value(oracle::uniform_in(b.lower, b.upper, rng));
      EXPECT_LT(std::abs(oracle::minkowski(p, p)), 1e-10) << c.name();
    }
  }
}

TEST(Builtin, FiniteDifferenceJetsMatchAnalytic) {
  std::mt19937_64 rng(12);
  for (const auto& c : catalog()) {
    const ImmersionChart fd = c.with_fd_backend(1e-3);
    const Box b = interior(c);
    for (int k = 0; k < 50; ++k) {
      const ParamPoint x = oracle::uniform_in(b.lower, b.upper, rng);
      const Jet2 a = c.jet(x), f = fd.jet(x);
      double err = max_diff(a.value(), f.value());
      for (Eigen::Index i = 0; i < c.n(); ++i) {
        err = std::max(err, max_diff(a.d1(i), f.d1(i)));
        for (Eigen::Index j = i; j < c.n(); ++j) err = std::max(err, max_diff(a.d2(i, j), f.d2(i, j)));
      }
      EXPECT_LT(err, 1e-8) << c.name() << " at " << x.transpose();
    }
  }
}

TEST(Domain, OutsidePointThrows) {
  const ImmersionChart c = builtin("euclidean", 2);
  EXPECT_THROW(c.value(pt({3, 0})), DomainError);
  EXPECT_THROW(c.jet(pt({0, -2.5})), DomainError);
}

TEST(Domain, FdStencilNearBoundaryThrows) {
  const ImmersionChart fd = builtin("euclidean", 2).with_fd_backend(1e-2);
  EXPECT_THROW(fd.jet(pt({1.99, 0})), FDStencilError);
  EXPECT_NO_THROW(fd.jet(pt({1.9, 0})));
}

TEST(ValidateSpacelike, EuclideanIsIdentity) {
  std::mt19937_64 rng(13);
  const ImmersionChart c = builtin("euclidean", 2);
  for (int k = 0; k < 20; ++k) {
    const Matrix g = validate_spacelike(c, oracle::uniform_in(pt({-2, -2}), pt({2, 2}), rng));
    EXPECT_LT((g - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ValidateSpacelike, HsProductAtOriginIsIdentity) {
  const Matrix g = validate_spacelike(builtin("hs_product", 1), pt({0, 0}));
  EXPECT_LT((g - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ValidateSpacelike, SymmetricPositiveDefiniteOnBuiltins) {
  std::mt19937_64 rng(14);
  for (const auto& c : catalog()) {
    for (int k = 0; k < 20; ++k) {
      const Matrix g = validate_spacelike(c, oracle::uniform_in(c.domain().lower, c.domain().upper, rng));
      EXPECT_EQ((g - g.transpose()).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_GT(min_eigenvalue(g), 0.0);
    }
  }
}

TEST(ValidateSpacelike, NullCurveIsRejected) {
  const ImmersionChart c("null_curve", 1, 3, Box::cube(1, -1, 1),
                         [](const ParamPoint& x) { return AmbientVector(pt({1, 1, 0}) * x[0]); });
  try {
    validate_spacelike(c, pt({0.2}));
    FAIL();
  } catch (const SpacelikeViolation& e) {
    EXPECT_LE(e.min_eigenvalue(), 1e-12);
  }
}

TEST(DualChart, EuclideanDualIsDegenerate) { EXPECT_THROW(dual_chart(builtin("euclidean", 2)), DualDegenerateError); }

TEST(DualChart, HsProductDualAtOrigin) {
  const ImmersionChart d = dual_chart(builtin("hs_product", 1));
  EXPECT_LT(max_diff(d.value(pt({0, 0})), pt({-0.5, 0, 0.5, 0})), 1e-12);
}

TEST(DualChart, HsProductDualIsScalarFlat) {
  const ImmersionChart d = dual_chart(builtin("hs_product", 1));
  std::mt19937_64 rng(15);
  const Box b = interior(d);
  for (int k = 0; k < 5; ++k) {
    const PointFrame f = build_frame(d, oracle::uniform_in(b.lower, b.upper, rng));
    EXPECT_LT(std::abs(f.S), 1e-6);
  }
}

TEST(DualChart, RoundSphereDualAgreesWithFormula) {
  // q = (-1/2, u/2) for the unit sphere; the dual chart differentiates it numerically.
  const ImmersionChart c = builtin("round_sphere", 2);
  const ImmersionChart d = dual_chart(c);
  const ParamPoint x = pt({0.3, -0.2});
  AmbientVector expect = c.value(x) / 2.0;
  expect[0] = -0.5;
  EXPECT_LT(max_diff(d.value(x), expect), 1e-12);
}
