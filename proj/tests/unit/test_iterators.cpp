#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hlab/iterators.hpp"
#include "oracles.hpp"

using namespace hlab;

namespace {

Point p1(double a) { return Point::Constant(1, a); }
Point p2(double a, double b) { return (Point(2) << a, b).finished(); }

SchemeConfig basic_config(Schedule beta, std::function<Point(std::size_t)> g, double x0, std::size_t n) {
  SchemeConfig c;
  c.kind = SchemeKind::basic;
  c.horizon = n;
  c.x0 = p1(x0);
  c.schedules.beta = std::move(beta);
  c.forcing = ExternalForcing{std::move(g)};
  return c;
}

ContractionMap half() { return ContractionMap(LipschitzMap::affine(0.5 * Matrix::Identity(1, 1), p1(0))); }

}  // namespace

TEST(StepBasic, Examples) {
  EXPECT_DOUBLE_EQ(step_basic(0.5, p1(2), p1(0))[0], 1.0);
  EXPECT_DOUBLE_EQ(step_basic(0.0, p1(2), p1(5))[0], 5.0);
  EXPECT_DOUBLE_EQ(step_basic(1.0, p1(2), p1(5))[0], 2.0);
  EXPECT_THROW(step_basic(1.5, p1(2), p1(5)), std::invalid_argument);
  EXPECT_THROW(step_basic(-0.1, p1(2), p1(5)), std::invalid_argument);
}

TEST(ErrorStep, MatchesDefinition) {
  // x=2, z=0 -> x'=1; z' = 0.25, e' = 0.75
  EXPECT_DOUBLE_EQ(error_step(0.5, 2.0, 0.25, 0.0), 0.75);
  EXPECT_DOUBLE_EQ(compute_ell(2.0, 0.0, 0.25), 0.125);
  EXPECT_DOUBLE_EQ(compute_ell(0.0, 1.0, 3.0), 1.0);
}

TEST(StepHalpern, Example) {
  const auto P = LipschitzMap::affine(0.5 * Matrix::Identity(1, 1), p1(1));
  // 0.5 * 0 + 0.5 * P(0) = 0.5
  EXPECT_DOUBLE_EQ(step_halpern(0.5, p1(0), P)[0], 0.5);
}

TEST(StepGeneralized, HandComputed) {
  StepCoefficients c{0.1, 0.5, 0.0, 0.05, 0.0};
  c.gamma = 1.0 - c.alpha - c.beta - c.delta;
  const MapFamily fam(LipschitzMap::identity(1));
  const Point x = p1(2.0);
  const Point got = step_generalized(c, half(), fam, 0, 0.2, 1.0, x, p1(1));
  const long double want = oracle::generalized_scalar(0.1, 0.5, 0.05, 0.0, 1.0, 2.0, 2.0, 0.2, 1.0, 1.0);
  EXPECT_NEAR(got[0], static_cast<double>(want), 1e-15);
}

TEST(StepGeneralized, ZReproducesStep) {
  StepCoefficients c{0.2, 0.3, 0.0, 0.1, 0.05};
  c.gamma = 1.0 + (1.0 - c.beta) * c.epsilon - c.alpha - c.beta - c.delta;
  const MapFamily fam(LipschitzMap::affine((Matrix(2, 2) << 0.2, 0.5, -0.3, 0.1).finished(), p2(1, 0)));
  const ContractionMap f(LipschitzMap::affine(0.4 * Matrix::Identity(2, 2), p2(0, 1)));
  const Point x = p2(0.7, -1.2), u = default_direction(2);
  const Point z = z_of_generalized(c, f, fam, 3, 0.1, 2.0, x, u);
  EXPECT_LE((step_basic(c.beta, x, z) - step_generalized(c, f, fam, 3, 0.1, 2.0, x, u)).norm(), 1e-15);
  c.beta = 1.0;
  EXPECT_THROW(z_of_generalized(c, f, fam, 3, 0.1, 2.0, x, u), std::invalid_argument);
}

TEST(DefaultDirection, UnitNorm) {
  EXPECT_NEAR(default_direction(4).norm(), 1.0, 1e-15);
  EXPECT_NEAR(default_direction(4)[2], 0.5, 1e-15);
}

TEST(Run, ConstantBetaZeroForcing) {
  const RunResult r = run(basic_config(Schedule::constant(0.5), [](std::size_t) { return p1(0); }, 1.0, 3));
  ASSERT_EQ(r.main.x.size(), 4u);
  EXPECT_DOUBLE_EQ(r.main.x[1][0], 0.5);
  EXPECT_DOUBLE_EQ(r.main.x[2][0], 0.25);
  EXPECT_DOUBLE_EQ(r.main.x[3][0], 0.125);
  EXPECT_FALSE(r.diverged());
}

TEST(Run, BetaZeroCopiesForcing) {
  const RunResult r = run(basic_config(Schedule::constant(0.0), [](std::size_t k) { return p1(k * 1.0); }, 7.0, 4));
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_DOUBLE_EQ(r.main.x[k][0], k - 1.0);
}

TEST(Run, BetaOneFreezes) {
  const RunResult r = run(basic_config(Schedule::constant(1.0), [](std::size_t) { return p1(9); }, 3.0, 10));
  for (const auto& x : r.main.x) EXPECT_EQ(x[0], 3.0);
}

TEST(Run, DivergenceGuardStops) {
  SchemeConfig c = basic_config(Schedule::constant(0.5), {}, 1.0, 500);
  c.forcing = FeedbackForcing{3.0, {}};  // x' = 0.5 x + 1.5 x = 2 x
  const RunResult r = run(c);
  EXPECT_TRUE(r.diverged());
  ASSERT_TRUE(r.main.meta.divergence_step);
  EXPECT_LT(r.main.x.size(), 60u);
  EXPECT_GT(r.main.x.back().norm(), kDivergenceNorm);
}

TEST(Run, IncrementForcingHitsEll) {
  // Short horizon: once e_k reaches rounding level the recorded ratio is noise.
  SchemeConfig c = basic_config(Schedule::constant(0.5), {}, 1.0, 15);
  c.forcing = IncrementForcing{p1(0), [](std::size_t, double b) { return b - 0.25; }};
  const RunResult r = run(c);
  ASSERT_EQ(r.main.ell.size(), r.main.steps() - 1);
  for (double l : r.main.ell) EXPECT_NEAR(l, 0.25, 1e-12);
}

TEST(Run, Deterministic) {
  SchemeConfig c = basic_config(Schedule::power_law(1, 0.5), [](std::size_t k) { return p1(std::sin(k * 1.0)); }, 0.3,
                                200);
  const RunResult a = run(c), b = run(c);
  for (std::size_t k = 0; k < a.main.x.size(); ++k) EXPECT_EQ(a.main.x[k][0], b.main.x[k][0]);
}

TEST(ClosedForm, HandExamples) {
  EXPECT_DOUBLE_EQ(closed_form_solution(std::vector<double>{0.5, 0.5, 0.5}, std::vector<double>{0, 0, 0}, 1.0, 3),
                   0.125);
  // 0.5 * 1 + 0.5 * 2 = 1.5 ; 0.5 * 1.5 + 0.5 * 4 = 2.75
  EXPECT_DOUBLE_EQ(closed_form_solution(std::vector<double>{0.5, 0.5}, std::vector<double>{2, 4}, 1.0, 2), 2.75);
  EXPECT_DOUBLE_EQ(closed_form_solution(std::vector<double>{}, std::vector<double>{}, 4.0, 0), 4.0);
}

TEST(ClosedForm, MatchesRunAndOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ub(0.0, 0.99), uz(-5.0, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 60;
    std::vector<double> beta(n), z(n);
    for (std::size_t k = 0; k < n; ++k) beta[k] = ub(rng), z[k] = uz(rng);
    const double x0 = uz(rng);
    const RunResult r = run(basic_config(Schedule::table(beta), [&](std::size_t k) { return p1(z[k]); }, x0, n));
    double scale = std::abs(x0);
    for (double v : z) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k <= n; ++k) {
      const double cf = closed_form_solution(beta, z, x0, k);
      EXPECT_NEAR(cf, r.main.x[k][0], 1e-10 * scale);
      EXPECT_NEAR(cf, static_cast<double>(oracle::closed_form_direct(beta, z, x0, k)), 1e-10 * scale);
    }
  }
}

TEST(ClosedForm, VectorVersionIsComponentwise) {
  const std::vector<double> beta{0.2, 0.7, 0.4};
  const std::vector<Point> z{p2(1, -1), p2(0, 2), p2(3, 3)};
  const Point got = closed_form_solution(beta, z, p2(5, 6), 3);
  EXPECT_NEAR(got[0], closed_form_solution(beta, std::vector<double>{1, 0, 3}, 5, 3), 1e-15);
  EXPECT_NEAR(got[1], closed_form_solution(beta, std::vector<double>{-1, 2, 3}, 6, 3), 1e-15);
}

TEST(Run, HalpernReachesFixedPoint) {
  SchemeConfig c;
  c.kind = SchemeKind::halpern;
  c.horizon = 200;
  c.x0 = p1(0);
  c.schedules.beta = Schedule::power_law(1, 0.5);
  c.P = LipschitzMap::affine(0.5 * Matrix::Identity(1, 1), p1(1));
  const RunResult r = run(c);
  EXPECT_NEAR(r.main.x.back()[0], 2.0, 1e-8);
}

TEST(Run, CoupledAuxThreeStepsByHand) {
  SchemeConfig c;
  c.kind = SchemeKind::coupled_aux;
  c.horizon = 3;
  c.x0 = p1(1.0);
  c.xbar0 = p1(0.0);
  c.schedules.alpha = Schedule::constant(0.1);
  c.schedules.beta = Schedule::constant(0.5);
  c.schedules.delta = Schedule::constant(0.1);
  c.schedules.epsilon = Schedule::constant(0.0);
  c.schedules.r = 2.0;
  c.f = half();
  c.family = MapFamily(LipschitzMap::affine(0.5 * Matrix::Identity(1, 1), p1(1)));
  c.direction = p1(1.0);
  const RunResult r = run(c);
  ASSERT_TRUE(r.aux);

  const double a = 0.1, b = 0.5, d = 0.1, g = 1 - a - b - d, rr = 2.0;
  double x = 1.0, xb = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double xn = a * 0.5 * x + b * x + g * (0.5 * x + 1) + d * rr;
    const double xbn = b * x + a * 0.5 * xb + g * (0.5 * xb + 1);
    x = xn, xb = xbn;
    EXPECT_NEAR(r.main.x[k + 1][0], x, 1e-15);
    EXPECT_NEAR(r.aux->x[k + 1][0], xb, 1e-15);
  }
}

TEST(Run, ClampKeepsIterateInSpace) {
  SchemeConfig c;
  c.kind = SchemeKind::generalized;
  c.horizon = 50;
  c.x0 = p2(3, 3);
  c.schedules.alpha = Schedule::power_law(0.2, 1);
  c.schedules.beta = Schedule::constant(0.3);
  c.f = ContractionMap(LipschitzMap::zero(2), 0.0);
  c.family = MapFamily(LipschitzMap::affine(Matrix::Identity(2, 2), p2(1, 1)));  // translation
  c.space = AmbientSpace::ball(p2(0, 0), 5.0);
  c.clamp = true;
  const RunResult r = run(c);
  for (const auto& x : r.main.x) EXPECT_TRUE(c.space->contains(x, 1e-12));
}

TEST(SchemeConfig, ValidateNamesMissingPiece) {
  SchemeConfig c;
  c.kind = SchemeKind::halpern;
  c.horizon = 5;
  c.x0 = p1(0);
  c.schedules.beta = Schedule::constant(0.5);
  try {
    c.validate();
    FAIL() << "expected throw";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("P"), std::string::npos) << e.what();
  }
}
