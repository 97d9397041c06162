#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hlab/report.hpp"

namespace hlab {

/// Asymptotic properties a coefficient sequence may be declared to have.
enum class Trait {
  tends_to_zero,
  sum_diverges,
  sum_converges,
  liminf_positive,
  limsup_below_one,
};

using TraitSet = std::set<Trait>;

std::string to_string(Trait t);
std::optional<Trait> parse_trait(std::string_view name);

/// Result of deciding a trait from a schedule's closed form.
enum class Certainty { holds, fails, unknown };

enum class ScheduleKind { constant, power_law, geometric, table, complement };

/// A real coefficient sequence k -> s_k on k = 0, 1, 2, ...
///
/// Families:
///   constant    s_k = c
///   power_law   s_k = clip(c * (k + shift)^(-a), 0, 1), shift defaults to 1
///   geometric   s_k = c * q^k
///   table       s_k = values[k], defined only up to the table horizon
///   complement  s_k = 1 - inner_k
///
/// Schedules are immutable and cheap to copy.
class Schedule {
 public:
  /// The zero sequence.
  Schedule();

  static Schedule constant(double c, TraitSet traits = {});
  static Schedule power_law(double c, double a, TraitSet traits = {}, double shift = 1.0);
  static Schedule geometric(double c, double q, TraitSet traits = {});
  static Schedule table(std::vector<double> values, TraitSet traits = {});
  static Schedule complement(Schedule inner, TraitSet traits = {});

  /// Throws std::out_of_range past the horizon of a table.
  double operator()(std::size_t k) const;

  ScheduleKind kind() const { return kind_; }
  const TraitSet& declared_traits() const { return traits_; }
  bool declares(Trait t) const { return traits_.count(t) != 0; }

  double c() const { return c_; }
  double a() const { return a_; }
  double q() const { return q_; }
  double shift() const { return shift_; }
  const Schedule* inner() const { return inner_.get(); }

  /// Last valid index for tables; nullopt for closed-form kinds.
  std::optional<std::size_t> horizon() const;
  /// True when asymptotic statements can only be checked up to horizon().
  bool horizon_limited() const;

  /// lim s_k when it exists and is decidable from the closed form.
  std::optional<double> limit() const;

  /// Decide a trait from the closed form; `unknown` for tables.
  Certainty closed_form(Trait t) const;

  /// Declared traits contradicted by the closed form.
  std::vector<Trait> inconsistent_traits() const;

  std::string describe() const;

 private:
  ScheduleKind kind_ = ScheduleKind::constant;
  double c_ = 0.0;
  double a_ = 0.0;
  double q_ = 1.0;
  double shift_ = 1.0;
  std::shared_ptr<const std::vector<double>> table_;
  std::shared_ptr<const Schedule> inner_;
  TraitSet traits_;
};

double eval_schedule(const Schedule& s, std::size_t k);

/// True when 1 - beta_k -> 0 with divergent partial sums, decided from the
/// closed form. Only a `complement` schedule can certify this.
Certainty certify_venter_beta(const Schedule& beta);

/// Integer-valued sequence s_k: the number of companion terms at step k.
class CountSchedule {
 public:
  CountSchedule() = default;
  static CountSchedule constant(std::size_t n);
  static CountSchedule table(std::vector<std::size_t> values);

  /// Throws std::out_of_range past the horizon of a table.
  std::size_t operator()(std::size_t k) const;
  std::size_t max_value() const;

 private:
  std::size_t constant_ = 0;
  std::shared_ptr<const std::vector<std::size_t>> table_;
};

/// Coefficients of one step of the generalized scheme.
struct StepCoefficients {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double delta = 0.0;
  double epsilon = 0.0;
};

/// All scalar sequences driving the generalized scheme. gamma is never stored:
/// it is derived so that alpha + beta + gamma + delta = 1 + (1 - beta) * epsilon.
struct ScheduleSet {
  Schedule alpha;
  Schedule beta;
  Schedule delta;
  Schedule epsilon;
  std::vector<Schedule> v;  // one weight sequence per companion function pair
  CountSchedule s;          // number of companion terms used at step k
  double r = 0.0;

  StepCoefficients at(std::size_t k) const;
};

double derive_gamma(const ScheduleSet& set, std::size_t k);

/// Finite-horizon and closed-form checks of the coefficient assumptions of
/// the generalized scheme. Entries:
///   ranges           beta in (0,1); alpha, delta, gamma in [0,1]; v >= 0
///   limits           alpha, delta -> 0; liminf gamma > 0
///   series           sum alpha diverges; sum delta converges
///   beta_bounds      0 < liminf beta <= limsup beta < 1
///   epsilon          epsilon_k >= 1/(beta_k - 1); epsilon -> 0
///   declared_traits  every declared trait agrees with its closed form
/// Findings never throw; the set is conforming iff every entry passes.
/// Requires horizon >= 2.
ReportSet validate_assumptions(const ScheduleSet& set, std::size_t horizon, double tol);

/// Coefficient checks for the positive scheme driven to zero by a Venter-type
/// beta: beta -> 1 with divergent sum of (1 - beta), bounded alpha, gamma,
/// delta in [0,1), summable delta when r != 0, and r >= 0.
ReportSet validate_positive_venter(const ScheduleSet& set, std::size_t horizon, double tol);

}  // namespace hlab
