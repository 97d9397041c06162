#include <gtest/gtest.h>

#include <cmath>

#include "hlab/schedules.hpp"

using namespace hlab;

TEST(Schedule, ConstantIsConstant) { EXPECT_DOUBLE_EQ(Schedule::constant(0.5)(7), 0.5); }

TEST(Schedule, PowerLawAtZeroIsC) { EXPECT_DOUBLE_EQ(Schedule::power_law(1.0, 1.0)(0), 1.0); }

TEST(Schedule, PowerLawHalfExponent) {
  // (3 + 1)^(-1/2) = 1/2
  EXPECT_NEAR(Schedule::power_law(1.0, 0.5)(3), 0.5, 1e-15);
}

TEST(Schedule, PowerLawShiftAndClip) {
  EXPECT_NEAR(Schedule::power_law(1.0, 1.0, {}, 2.0)(0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(Schedule::power_law(5.0, 1.0)(0), 1.0);
  EXPECT_DOUBLE_EQ(Schedule::power_law(-1.0, 1.0)(3), 0.0);
}

TEST(Schedule, GeometricAndComplement) {
  EXPECT_NEAR(Schedule::geometric(0.2, 0.5)(3), 0.025, 1e-16);
  const Schedule b = Schedule::complement(Schedule::power_law(1.0, 1.0, {}, 2.0));
  EXPECT_NEAR(b(0), 0.5, 1e-15);
  EXPECT_NEAR(b(8), 0.9, 1e-15);
}

TEST(Schedule, TableHorizon) {
  const Schedule t = Schedule::table({0.1, 0.2, 0.3});
  EXPECT_DOUBLE_EQ(t(2), 0.3);
  EXPECT_THROW(t(3), std::out_of_range);
  ASSERT_TRUE(t.horizon());
  EXPECT_EQ(*t.horizon(), 2u);
  EXPECT_TRUE(t.horizon_limited());
  EXPECT_EQ(t.closed_form(Trait::tends_to_zero), Certainty::unknown);
}

TEST(Schedule, RejectsNonFiniteParameters) {
  EXPECT_THROW(Schedule::constant(NAN), std::invalid_argument);
  EXPECT_THROW(Schedule::power_law(1.0, INFINITY), std::invalid_argument);
}

TEST(Schedule, ClosedFormTraits) {
  EXPECT_EQ(Schedule::power_law(1, 1).closed_form(Trait::sum_diverges), Certainty::holds);
  EXPECT_EQ(Schedule::power_law(1, 2).closed_form(Trait::sum_converges), Certainty::holds);
  EXPECT_EQ(Schedule::power_law(1, 0.5).closed_form(Trait::tends_to_zero), Certainty::holds);
  EXPECT_EQ(Schedule::constant(0.3).closed_form(Trait::sum_converges), Certainty::fails);
  EXPECT_EQ(Schedule::constant(0.0).closed_form(Trait::sum_converges), Certainty::holds);
  EXPECT_EQ(Schedule::geometric(1, 0.9).closed_form(Trait::sum_converges), Certainty::holds);
  EXPECT_EQ(Schedule::constant(1.0).closed_form(Trait::limsup_below_one), Certainty::fails);
}

TEST(Schedule, InconsistentDeclaredTrait) {
  const Schedule d = Schedule::constant(0.3, {Trait::sum_converges});
  ASSERT_EQ(d.inconsistent_traits().size(), 1u);
  EXPECT_EQ(d.inconsistent_traits()[0], Trait::sum_converges);
}

TEST(Schedule, TraitNamesRoundTrip) {
  for (Trait t : {Trait::tends_to_zero, Trait::sum_diverges, Trait::sum_converges, Trait::liminf_positive,
                  Trait::limsup_below_one}) {
    EXPECT_EQ(parse_trait(to_string(t)), t);
  }
  EXPECT_FALSE(parse_trait("bogus"));
}

TEST(VenterBeta, OnlyComplementOfVanishingDivergentCertifies) {
  EXPECT_EQ(certify_venter_beta(Schedule::complement(Schedule::power_law(1, 1, {}, 2))), Certainty::holds);
  EXPECT_EQ(certify_venter_beta(Schedule::complement(Schedule::power_law(1, 2))), Certainty::fails);
  EXPECT_EQ(certify_venter_beta(Schedule::constant(0.5)), Certainty::fails);
  EXPECT_EQ(certify_venter_beta(Schedule::table({0.5, 0.6})), Certainty::unknown);
}

TEST(CountSchedule, ConstantAndTable) {
  EXPECT_EQ(CountSchedule::constant(2)(100), 2u);
  const CountSchedule t = CountSchedule::table({0, 1, 2});
  EXPECT_EQ(t(1), 1u);
  EXPECT_EQ(t.max_value(), 2u);
  EXPECT_THROW(t(3), std::out_of_range);
}

namespace {

ScheduleSet set_of(double a, double b, double d, double e) {
  ScheduleSet s;
  s.alpha = Schedule::constant(a);
  s.beta = Schedule::constant(b);
  s.delta = Schedule::constant(d);
  s.epsilon = Schedule::constant(e);
  return s;
}

}  // namespace

TEST(DeriveGamma, SumToOneReduction) { EXPECT_NEAR(derive_gamma(set_of(0, 0.5, 0, 0), 0), 0.5, 1e-15); }

TEST(DeriveGamma, WithAlphaAndDelta) {
  // 1 - 0.1 - 0.5 - 0.05
  EXPECT_NEAR(derive_gamma(set_of(0.1, 0.5, 0.05, 0), 0), 0.35, 1e-15);
}

TEST(DeriveGamma, WithEpsilon) {
  // 1 + 0.5 * 0.2 - 0.5
  EXPECT_NEAR(derive_gamma(set_of(0, 0.5, 0, 0.2), 0), 0.6, 1e-15);
}

TEST(DeriveGamma, CoefficientIdentityHoldsEverywhere) {
  ScheduleSet s;
  s.alpha = Schedule::power_law(0.3, 1);
  s.beta = Schedule::constant(0.4);
  s.delta = Schedule::power_law(0.1, 2);
  s.epsilon = Schedule::geometric(0.5, 0.5);
  for (std::size_t k = 0; k < 50; ++k) {
    const StepCoefficients c = s.at(k);
    EXPECT_NEAR(c.alpha + c.beta + c.gamma + c.delta, 1.0 + (1.0 - c.beta) * c.epsilon, 1e-14);
  }
}

namespace {

ScheduleSet conforming() {
  ScheduleSet s;
  s.alpha = Schedule::power_law(0.1, 1, {Trait::sum_diverges});
  s.beta = Schedule::constant(0.5);
  s.delta = Schedule::power_law(0.1, 2, {Trait::sum_converges});
  s.epsilon = Schedule::constant(0.0);
  return s;
}

}  // namespace

TEST(ValidateAssumptions, ConformingSet) {
  const ReportSet rs = validate_assumptions(conforming(), 1000, 1e-6);
  for (const auto& r : rs.entries) EXPECT_EQ(r.status, Status::pass) << to_line(r);
  EXPECT_TRUE(rs.conforming());
}

TEST(ValidateAssumptions, ConstantDeltaDeclaredSummable) {
  ScheduleSet s = conforming();
  s.delta = Schedule::constant(0.3, {Trait::sum_converges});
  const ReportSet rs = validate_assumptions(s, 1000, 1e-6);
  EXPECT_FALSE(rs.conforming());
  ASSERT_NE(rs.find("declared_traits"), nullptr);
  EXPECT_EQ(rs.find("declared_traits")->status, Status::fail);
}

TEST(ValidateAssumptions, BetaOneIsRangeViolation) {
  ScheduleSet s = conforming();
  s.beta = Schedule::constant(1.0);
  const ReportSet rs = validate_assumptions(s, 100, 1e-6);
  EXPECT_FALSE(rs.conforming());
  ASSERT_NE(rs.find("ranges"), nullptr);
  EXPECT_EQ(rs.find("ranges")->status, Status::fail);
  EXPECT_EQ(rs.find("ranges")->at("first_violation_k"), 0.0);
}

TEST(ValidateAssumptions, NegativeGammaFlagged) {
  ScheduleSet s = conforming();
  s.alpha = Schedule::power_law(1.0, 1);  // alpha_0 = 1, gamma_0 < 0
  EXPECT_EQ(validate_assumptions(s, 100, 1e-6).find("ranges")->status, Status::fail);
}

TEST(ValidateAssumptions, EpsilonLowerBound) {
  ScheduleSet s = conforming();
  s.epsilon = Schedule::constant(-3.0);  // below 1/(beta - 1) = -2
  const ReportSet rs = validate_assumptions(s, 100, 1e-6);
  EXPECT_EQ(rs.find("epsilon")->status, Status::fail);
}

TEST(ValidateAssumptions, TableOnlyCheckedToItsHorizon) {
  ScheduleSet s = conforming();
  std::vector<double> a(200);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = 0.1 / (k + 1);
  s.alpha = Schedule::table(a, {Trait::tends_to_zero, Trait::sum_diverges});
  const ReportSet rs = validate_assumptions(s, 5000, 1e-6);
  EXPECT_TRUE(rs.conforming());
  bool noted = false;
  for (const auto& r : rs.entries) {
    for (const auto& n : r.notes) noted = noted || n.find("horizon-limited") != std::string::npos;
  }
  EXPECT_TRUE(noted);
}

TEST(ValidateAssumptions, UndeclaredTableTraitIsInconclusive) {
  ScheduleSet s = conforming();
  s.alpha = Schedule::table(std::vector<double>(100, 0.01));
  const ReportSet rs = validate_assumptions(s, 100, 1e-6);
  EXPECT_FALSE(rs.conforming());
  EXPECT_FALSE(rs.any_failure());
}

TEST(ValidatePositiveVenter, Corollary413Schedules) {
  ScheduleSet s;
  s.beta = Schedule::complement(Schedule::power_law(1, 1, {}, 2));
  s.alpha = Schedule::power_law(0.5, 1, {}, 2);
  s.delta = Schedule::power_law(0.25, 2, {}, 2);
  s.r = 1.0;
  const ReportSet rs = validate_positive_venter(s, 1000, 1e-6);
  for (const auto& r : rs.entries) EXPECT_EQ(r.status, Status::pass) << to_line(r);
}

TEST(ValidatePositiveVenter, ConstantBetaFails) {
  ScheduleSet s;
  s.beta = Schedule::constant(0.5);
  s.alpha = Schedule::power_law(0.1, 1);
  EXPECT_EQ(validate_positive_venter(s, 1000, 1e-6).find("venter_beta")->status, Status::fail);
}
