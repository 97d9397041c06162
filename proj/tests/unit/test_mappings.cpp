#include <gtest/gtest.h>

#include <cmath>

#include "hlab/mappings.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

Point p2(double a, double b) { return (Point(2) << a, b).finished(); }

Matrix rot(double th) { return (Matrix(2, 2) << std::cos(th), -std::sin(th), std::sin(th), std::cos(th)).finished(); }

const AmbientSpace kBall = AmbientSpace::ball(p2(0, 0), 3.0);

}  // namespace

TEST(AmbientSpace, BallContainsProjectSample) {
  const AmbientSpace C = AmbientSpace::ball(p2(1, 0), 2.0);
  EXPECT_TRUE(C.contains(p2(2, 1)));
  EXPECT_FALSE(C.contains(p2(4, 0)));
  EXPECT_TRUE(C.project(p2(5, 0)).isApprox(p2(3, 0)));
  EXPECT_DOUBLE_EQ(C.diameter(), 4.0);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) EXPECT_TRUE(C.contains(C.sample(rng), 1e-12));
}

TEST(AmbientSpace, BoxProjectIsClamp) {
  const AmbientSpace C = AmbientSpace::box(p2(0, 0), p2(1, 2));
  EXPECT_TRUE(C.project(p2(-1, 3)).isApprox(p2(0, 2)));
  EXPECT_NEAR(C.diameter(), std::sqrt(5.0), 1e-15);
  EXPECT_THROW(AmbientSpace::box(p2(1, 0), p2(0, 1)), std::invalid_argument);
}

TEST(LipschitzMap, HalfScaling) {
  const auto f = LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2));
  EXPECT_TRUE(f(p2(2, 0)).isApprox(p2(1, 0)));
  EXPECT_NEAR(f.lipschitz(), 0.5, 1e-15);
}

TEST(LipschitzMap, AffineOffset) {
  const auto f = LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), p2(1, 1));
  EXPECT_TRUE(f(p2(0, 0)).isApprox(p2(1, 1)));
}

TEST(LipschitzMap, ScaledRotation) {
  const auto f = LipschitzMap::affine(0.9 * rot(M_PI / 4), Point::Zero(2));
  const Point y = f(p2(1, 0));
  EXPECT_NEAR(y[0], 0.9 * std::cos(M_PI / 4), 1e-15);
  EXPECT_NEAR(y[1], 0.9 * std::sin(M_PI / 4), 1e-15);
  EXPECT_NEAR(f.lipschitz(), 0.9, 1e-14);
}

TEST(LipschitzMap, SpectralNormMatchesOracle) {
  const Matrix A = (Matrix(2, 2) << 0.3, 0.7, -0.2, 0.4).finished();
  const auto f = LipschitzMap::affine(A, Point::Zero(2));
  EXPECT_NEAR(f.lipschitz(), oracle::spectral_norm_2x2(0.3, 0.7, -0.2, 0.4), 1e-14);
}

TEST(LipschitzMap, ErrorsAndProjection) {
  const auto f = LipschitzMap::identity(2);
  EXPECT_THROW(f(Point::Zero(3)), std::invalid_argument);
  const auto bad = LipschitzMap::callable(1, [](const Point&) { return Point::Constant(1, NAN); }, 1.0);
  EXPECT_THROW(bad(Point::Zero(1)), NonFiniteError);
  const auto P = LipschitzMap::box_projection(Point::Zero(1), Point::Ones(1));
  EXPECT_DOUBLE_EQ(P(Point::Constant(1, 1.7))[0], 1.0);
  EXPECT_DOUBLE_EQ(P(Point::Constant(1, 0.3))[0], 0.3);
  EXPECT_DOUBLE_EQ(P.lipschitz(), 1.0);
}

TEST(ContractionMap, BoundChecked) {
  EXPECT_NO_THROW(ContractionMap(LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2))));
  EXPECT_THROW(ContractionMap(LipschitzMap::identity(2)), std::invalid_argument);
  EXPECT_THROW(ContractionMap(LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2)), 0.4),
               std::invalid_argument);
  const ContractionMap f(LipschitzMap::zero(2), 0.3);
  EXPECT_DOUBLE_EQ(f.lipschitz_bound(), 0.3);
  EXPECT_TRUE(apply_contraction(f, p2(4, 4)).isZero());
}

TEST(MapFamily, IdentityFamily) {
  const MapFamily fam(LipschitzMap::identity(2));
  for (std::size_t k : {0u, 5u, 1000u}) EXPECT_TRUE(fam(k, p2(3, -1)).isApprox(p2(3, -1)));
}

TEST(MapFamily, PerturbedAtK1) {
  // T_inf(x) = x/2, G = (1, 0), eta_1 = 1/2: (1, 1) + 0.5 (1, 0)
  const MapFamily fam(LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2)), LipschitzMap::constant(p2(1, 0)),
                      Schedule::power_law(1, 1));
  EXPECT_TRUE(apply_family(fam, 1, p2(2, 2)).isApprox(p2(1.5, 1)));
  EXPECT_TRUE(fam.at(1)(p2(2, 2)).isApprox(p2(1.5, 1)));
}

TEST(MapFamily, DecaysToLimit) {
  const MapFamily fam(LipschitzMap::identity(2), LipschitzMap::constant(p2(1, 1)), Schedule::geometric(1, 0.5));
  EXPECT_LE((fam(200, p2(3, 4)) - p2(3, 4)).norm(), 1e-12);
  EXPECT_NEAR(fam.lipschitz_bound(0), 1.0, 1e-15);  // constant G has L = 0
}

TEST(EstimateLipschitz, Identity) {
  const double L = estimate_lipschitz(LipschitzMap::identity(2), kBall, 64, 1);
  EXPECT_LE(L, 1.0 + 1e-12);
  EXPECT_GE(L, 1.0 - 1e-12);
}

TEST(EstimateLipschitz, HalfScaling) {
  const double L = estimate_lipschitz(LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2)), kBall, 64, 1);
  EXPECT_NEAR(L, 0.5, 1e-12);
}

TEST(EstimateLipschitz, DiagonalApproachesSpectralNorm) {
  const auto f = LipschitzMap::affine((Matrix(2, 2) << 0.3, 0, 0, 0.8).finished(), Point::Zero(2));
  const double small = estimate_lipschitz(f, kBall, 16, 7);
  const double big = estimate_lipschitz(f, kBall, 512, 7);
  EXPECT_LE(big, 0.8 + 1e-12);
  EXPECT_GE(big, small - 1e-15);
  EXPECT_GT(big, 0.8 - 1e-3);
}

TEST(EstimateLipschitz, Errors) {
  EXPECT_THROW(estimate_lipschitz(LipschitzMap::identity(2), kBall, 1, 0), std::invalid_argument);
  EXPECT_THROW(AmbientSpace::ball(p2(0, 0), 0.0), std::invalid_argument);
  const AmbientSpace point = AmbientSpace::box(p2(1, 1), p2(1, 1));
  EXPECT_THROW(estimate_lipschitz(LipschitzMap::identity(2), point, 8, 0), std::runtime_error);
}

TEST(FamilyDrift, ZeroForConstantFamily) {
  const MapFamily fam(LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2)));
  for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(family_drift(fam, k, kBall, 16, 0), 0.0);
}

TEST(FamilyDrift, HarmonicEta) {
  const MapFamily fam(LipschitzMap::identity(2), LipschitzMap::constant(p2(1, 0)), Schedule::power_law(1, 1));
  for (std::size_t k = 0; k < 30; ++k) {
    EXPECT_NEAR(family_drift(fam, k, kBall, 16, 0), 1.0 / ((k + 1.0) * (k + 2.0)), 1e-14);
  }
}

TEST(FamilyDrift, GeometricEtaDecreases) {
  const MapFamily fam(LipschitzMap::identity(2), LipschitzMap::identity(2), Schedule::geometric(1, 0.8));
  double prev = INFINITY;
  for (std::size_t k = 0; k <= 100; ++k) {
    const double d = family_drift(fam, k, kBall, 16, 0);
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(ExpansionQuotient, ContractionIsNegative) {
  const MapFamily fam(LipschitzMap::affine(0.5 * Matrix::Identity(2, 2), Point::Zero(2)));
  const auto q = expansion_quotient(fam, Schedule::power_law(1, 1), Schedule::power_law(1, 2), {10, 100, 1000}, kBall,
                                    64, 0);
  EXPECT_LT(q.max_quotient, 0.0);
  EXPECT_TRUE(q.skipped.empty());
}

TEST(ExpansionQuotient, IdentityIsNonPositive) {
  const MapFamily fam(LipschitzMap::identity(2));
  const auto q =
      expansion_quotient(fam, Schedule::power_law(1, 1), Schedule::power_law(1, 2), {10, 100}, kBall, 64, 0);
  EXPECT_LE(q.max_quotient, 0.0);
}

TEST(ExpansionQuotient, SlowPerturbationIsPositive) {
  // eta_k = sqrt(min(alpha_k, delta_k)) = 1/(k+1) with T_inf = G = identity.
  const MapFamily fam(LipschitzMap::identity(2), LipschitzMap::identity(2), Schedule::power_law(1, 1));
  const auto q =
      expansion_quotient(fam, Schedule::power_law(1, 1), Schedule::power_law(1, 2), {10, 100}, kBall, 64, 0);
  EXPECT_GT(q.max_quotient, 0.0);
}

TEST(ExpansionQuotient, ZeroWeightsSkipped) {
  const MapFamily fam(LipschitzMap::identity(2));
  const auto q = expansion_quotient(fam, Schedule::power_law(1, 1), Schedule::constant(0), {1, 2}, kBall, 8, 0);
  EXPECT_EQ(q.skipped.size(), 2u);
  EXPECT_TRUE(std::isinf(q.max_quotient));
}
