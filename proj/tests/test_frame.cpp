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

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

std::vector<ImmersionChart> catalog() {
  return {builtin("euclidean", 2), builtin("euclidean", 3), builtin("hs_product", 1), builtin("hs_product", 2),
          builtin("round_sphere", 2), builtin("round_sphere", 3)};
}

Box interior(const ImmersionChart& c) { return c.domain().shrunk(0.1 * c.domain().scale()); }

ParamPoint random_unit(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ParamPoint v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
  return v.normalized();
}

}  // namespace

TEST(DualMap, EuclideanIsConstant) {
  std::mt19937_64 rng(21);
  const ImmersionChart c = builtin("euclidean", 3);
  for (int k = 0; k < 50; ++k) {
    const AmbientVector q = dual_map(c.jet(oracle::uniform_in(c.domain().lower, c.domain().upper, rng)));
    EXPECT_LT(max_diff(q, pt({-1, -1, 0, 0, 0})), 1e-10);
  }
}

TEST(DualMap, HsProductAtOrigin) {
  EXPECT_LT(max_diff(dual_map(builtin("hs_product", 1).jet(pt({0, 0}))), pt({-0.5, 0, 0.5, 0})), 1e-15);
}

TEST(DualMap, HsProductIsHalfReflection) {
  std::mt19937_64 rng(22);
  for (int n : {1, 2}) {
    const ImmersionChart c = builtin("hs_product", n);
    for (int k = 0; k < 50; ++k) {
      const Jet2 j = c.jet(oracle::uniform_in(c.domain().lower, c.domain().upper, rng));
      AmbientVector expect = 0.5 * j.value();
      expect.head(n + 1) *= -1.0;
      EXPECT_LT(max_diff(dual_map(j), expect), 1e-9 * std::max(1.0, j.value().norm()));
    }
  }
}

TEST(DualMap, RoundSpherePoleMatchesGenericSolve) {
  const Jet2 j = builtin("round_sphere", 2).jet(pt({0, 0}));
  const AmbientVector q = dual_map(j);
  EXPECT_LT(max_diff(q, pt({-0.5, 0, 0, 0.5})), 1e-15);
  EXPECT_LT(max_diff(q, oracle::dual_by_solve(j.value(), j.d1())), 1e-12);
}

TEST(DualMap, AgreesWithGenericSolveEverywhere) {
  std::mt19937_64 rng(23);
  for (const auto& c : catalog()) {
    for (int k = 0; k < 50; ++k) {
      const Jet2 j = c.jet(oracle::uniform_in(c.domain().lower, c.domain().upper, rng));
      const AmbientVector q = dual_map(j);
      EXPECT_LT(max_diff(q, oracle::dual_by_solve(j.value(), j.d1())), 1e-9 * std::max(1.0, q.norm())) << c.name();
    }
  }
}

TEST(DualMap, DualityResidualsOnBuiltins) {
  std::mt19937_64 rng(24);
  for (const auto& c : catalog()) {
    for (int k = 0; k < 200; ++k) {
      const PointFrame f = build_frame(c, oracle::uniform_in(c.domain().lower, c.domain().upper, rng));
      EXPECT_LT(f.duality_residuals().max(), 1e-9) << c.name();
    }
  }
}

TEST(DualMap, UndefinedWhenPointIsOrthogonalToTheNormalPlane) {
  const std::vector<AmbientVector> t = {pt({0, 0, 1, 0}), pt({0, 0, 0, 1})};
  EXPECT_THROW(dual_map(pt({0, 1, 0, 0}), t), DualUndefinedError);
}

TEST(BuildFrame, Euclidean) {
  const PointFrame f = build_frame(builtin("euclidean", 2), pt({0.7, -1.1}));
  EXPECT_LT(f.A.cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(f.S, 0.0, 1e-14);
  EXPECT_LT(max_diff(f.H, pt({2, 2, 0, 0})), 1e-14);
}

TEST(BuildFrame, HsProductAtOrigin) {
  const PointFrame f = build_frame(builtin("hs_product", 1), pt({0, 0}));
  EXPECT_LT(max_diff(f.A, Eigen::Vector2d(0.5, -0.5).asDiagonal().toDenseMatrix()), 1e-15);
  EXPECT_NEAR(f.trA, 0.0, 1e-15);
  EXPECT_NEAR(f.trA2, 0.5, 1e-15);
  EXPECT_NEAR(f.S, 0.0, 1e-15);
}

TEST(BuildFrame, RoundSphere) {
  std::mt19937_64 rng(25);
  const ImmersionChart c = builtin("round_sphere", 2);
  for (int k = 0; k < 20; ++k) {
    const PointFrame f = build_frame(c, oracle::uniform_in(c.domain().lower, c.domain().upper, rng));
    EXPECT_LT(max_diff(f.A, -0.5 * Matrix::Identity(2, 2)), 1e-12);
    EXPECT_NEAR(f.trA, -1.0, 1e-12);
    EXPECT_NEAR(f.S, 2.0, 1e-12);
  }
}

TEST(BuildFrame, InvariantsHoldOnBuiltins) {
  std::mt19937_64 rng(26);
  for (const auto& c : catalog()) {
    const double n = static_cast<double>(c.n());
    for (int k = 0; k < 20; ++k) {
      const PointFrame f = build_frame(c, oracle::uniform_in(c.domain().lower, c.domain().upper, rng));
      const double s = std::max(1.0, f.g.norm());
      EXPECT_LT(max_diff(f.g * f.A, f.h), 1e-10 * s) << c.name();
      EXPECT_LT(max_diff(f.onb.transpose() * f.g * f.onb, Matrix::Identity(c.n(), c.n())), 1e-10) << c.name();
      EXPECT_NEAR(f.S, -2.0 * (n - 1.0) * f.trA, 1e-12);
      EXPECT_LT(max_diff(f.H, f.trA * f.p() - n * f.q), 1e-12 * std::max(1.0, f.p().norm()));
      EXPECT_NEAR(f.trA2, (f.A * f.A).trace(), 1e-12 * std::max(1.0, std::abs(f.trA2)));
      // onb upper triangular with positive diagonal (Gram-Schmidt in coordinate order)
      for (Eigen::Index i = 0; i < c.n(); ++i) {
        EXPECT_GT(f.onb(i, i), 0.0);
        for (Eigen::Index j = 0; j < i; ++j) EXPECT_EQ(f.onb(i, j), 0.0);
      }
    }
  }
}

TEST(BuildFrame, NullCurveRaisesSpacelikeViolation) {
  const ImmersionChart c("null_curve", 1, 3, Box::cube(1, -1, 1),
                         [](const ParamPoint& x) { return AmbientVector(pt({1, 1, 0}) * x[0]); });
  EXPECT_THROW(build_frame(c, pt({0.3})), SpacelikeViolation);
}

TEST(SecondFundamentalForm, EuclideanE1E1) {
  const PointFrame f = build_frame(builtin("euclidean", 2), pt({0.2, 0.4}));
  EXPECT_LT(max_diff(second_fundamental_form(f, pt({1, 0}), pt({1, 0})), pt({1, 1, 0, 0})), 1e-14);
  EXPECT_LT(max_diff(second_fundamental_form_from_jet(f, pt({1, 0}), pt({1, 0})), pt({1, 1, 0, 0})), 1e-14);
}

TEST(SecondFundamentalForm, ZeroArgumentGivesZero) {
  const PointFrame f = build_frame(builtin("round_sphere", 2), pt({0.2, 0.4}));
  EXPECT_EQ(second_fundamental_form(f, pt({0, 0}), pt({0.3, 1})).cwiseAbs().maxCoeff(), 0.0);
}

TEST(SecondFundamentalForm, SymmetricAndMatchesRawProjection) {
  std::mt19937_64 rng(27);
  for (const auto& c : catalog()) {
    const Box b = interior(c);
    for (int k = 0; k < 20; ++k) {
      const PointFrame f = build_frame(c, oracle::uniform_in(b.lower, b.upper, rng));
      const ParamPoint X = random_unit(c.n(), rng), Y = random_unit(c.n(), rng);
      const AmbientVector xy = second_fundamental_form(f, X, Y);
      EXPECT_LT(max_diff(xy, second_fundamental_form(f, Y, X)), 1e-13);
      EXPECT_LT(max_diff(xy, second_fundamental_form_from_jet(f, X, Y)), 1e-9 * std::max(1.0, f.p().norm()));
    }
  }
}

TEST(SecondFundamentalForm, TraceMatchesMeanCurvature) {
  std::mt19937_64 rng(28);
  for (const auto& c : catalog()) {
    const Box b = interior(c);
    for (int k = 0; k < 20; ++k) {
      const PointFrame f = build_frame(c, oracle::uniform_in(b.lower, b.upper, rng));
      EXPECT_LT(max_diff(mean_curvature_from_jet(f), f.H), 1e-7 * std::max(1.0, f.p().norm())) << c.name();
    }
  }
}

TEST(DualDerivative, EuclideanVanishes) {
  const ImmersionChart c = builtin("euclidean", 2);
  EXPECT_LT(dual_derivative(c, pt({0.3, 0.1}), pt({0.6, 0.8})).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(DualDerivative, HsProductAlongS) {
  const AmbientVector dq = dual_derivative(builtin("hs_product", 1), pt({0, 0}), pt({1, 0}));
  EXPECT_LT(max_diff(dq, pt({0, -0.5, 0, 0})), 1e-10);
}

TEST(DualDerivative, RoundSphereIsHalfDp) {
  std::mt19937_64 rng(29);
  const ImmersionChart c = builtin("round_sphere", 2);
  const Box b = interior(c);
  for (int k = 0; k < 20; ++k) {
    const ParamPoint x = oracle::uniform_in(b.lower, b.upper, rng);
    const ParamPoint v = random_unit(2, rng);
    const Jet2 j = c.jet(x);
    const AmbientVector dp = v[0] * j.d1(0) + v[1] * j.d1(1);
    EXPECT_LT(max_diff(dual_derivative(c, x, v), 0.5 * dp), 1e-9);
  }
}

TEST(DualDerivative, TangentAndEqualToMinusAV) {
  std::mt19937_64 rng(30);
  for (const auto& c : catalog()) {
    const Box b = interior(c);
    for (int k = 0; k < 100; ++k) {
      const ParamPoint x = oracle::uniform_in(b.lower, b.upper, rng);
      const ParamPoint v = random_unit(c.n(), rng);
      const PointFrame f = build_frame(c, x);
      EXPECT_LT(dual_derivative_residual(f, v, dual_derivative(c, x, v)), 1e-6) << c.name();
    }
  }
}

TEST(DualDerivative, NearBoundaryThrows) {
  const ImmersionChart c = builtin("euclidean", 2);
  EXPECT_THROW(dual_derivative(c, pt({2.0, 0}), pt({1, 0})), FDStencilError);
}

TEST(IntrinsicOracle, Euclidean) {
  const IntrinsicCurvatureReport r = intrinsic_oracle(builtin("euclidean", 2), pt({0.3, -0.4}));
  EXPECT_NEAR(r.S_intrinsic, 0.0, 1e-6);
  EXPECT_LT(r.gauss_residual, 1e-6);
  EXPECT_LT(r.max_sample_residual, 1e-6);
}

TEST(IntrinsicOracle, RoundSphere) {
  const IntrinsicCurvatureReport r = intrinsic_oracle(builtin("round_sphere", 2), pt({0.2, 0.5}));
  EXPECT_NEAR(r.S_intrinsic, 2.0, 1e-5);
  EXPECT_NEAR(r.S_extrinsic, 2.0, 1e-12);
  EXPECT_LT(r.max_sample_residual, 1e-5);
}

TEST(IntrinsicOracle, HsProductIsFlat) {
  const IntrinsicCurvatureReport r = intrinsic_oracle(builtin("hs_product", 1), pt({0.4, 1.1}));
  EXPECT_NEAR(r.S_intrinsic, 0.0, 1e-6);
}

TEST(IntrinsicOracle, RoundSphereAgreesWithBrioschi) {
  const ImmersionChart c = builtin("round_sphere", 2);
  auto metric = [&](const Eigen::VectorXd& y) { return validate_spacelike(c, y); };
  std::mt19937_64 rng(31);
  const Box b = interior(c);
  for (int k = 0; k < 5; ++k) {
    const ParamPoint x = oracle::uniform_in(b.lower, b.upper, rng);
    const double K = oracle::brioschi_K(metric, x, 1e-3);
    EXPECT_NEAR(intrinsic_oracle(c, x).S_intrinsic, 2.0 * K, 1e-5);
  }
}

TEST(IntrinsicOracle, GaussIdentityOnBuiltins) {
  std::mt19937_64 rng(32);
  for (const auto& c : catalog()) {
    const Box b = interior(c);
    for (int k = 0; k < 3; ++k) {
      const IntrinsicCurvatureReport r = intrinsic_oracle(c, oracle::uniform_in(b.lower, b.upper, rng));
      EXPECT_LT(r.gauss_residual, 1e-5) << c.name();
      EXPECT_LT(r.max_sample_residual, 1e-5) << c.name();
      EXPECT_FALSE(r.ill_conditioned);
    }
  }
}
