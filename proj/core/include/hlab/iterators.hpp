#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hlab/companion.hpp"
#include "hlab/mappings.hpp"
#include "hlab/schedules.hpp"
#include "hlab/types.hpp"

namespace hlab {

enum class SchemeKind { basic, halpern, viscosity, generalized, coupled_aux };

std::string to_string(SchemeKind k);
std::optional<SchemeKind> parse_scheme_kind(std::string_view name);

/// Which iterate multiplies beta_k in the auxiliary recursion. `main_iterate`
/// uses x_k of the main scheme; `own_iterate` uses the auxiliary xbar_k.
enum class AuxVariant { main_iterate, own_iterate };

std::string to_string(AuxVariant v);

inline constexpr double kDivergenceNorm = 1e12;

// ---- step functions ------------------------------------------------------

/// beta x + (1 - beta) z. Throws std::invalid_argument unless 0 <= beta <= 1.
Point step_basic(double beta, const Point& x, const Point& z);

/// beta e_k - (z_{k+1} - z_k): the error x_{k+1} - z_{k+1} of a scalar scheme.
double error_step(double beta, double e, double z_next, double z_cur);

/// (z_{k+1} - z_k) / e_k, and 1 when e_k = 0.
double compute_ell(double e, double z_cur, double z_next);

/// step_basic with z = P(x).
Point step_halpern(double beta, const Point& x, const LipschitzMap& P);

/// alpha f(x) + beta x + gamma T_k(x) + (phi_term + delta r) u.
Point step_generalized(const StepCoefficients& c, const ContractionMap& f, const MapFamily& fam, std::size_t k,
                       double phi_term, double r, const Point& x, const Point& u);

/// (alpha f(x) + gamma T_k(x) + (phi_term + delta r) u) / (1 - beta), so that
/// step_basic(beta, x, z) reproduces step_generalized. Requires beta < 1.
Point z_of_generalized(const StepCoefficients& c, const ContractionMap& f, const MapFamily& fam, std::size_t k,
                       double phi_term, double r, const Point& x, const Point& u);

/// beta x_k + alpha f(xbar_k) + gamma T_k(xbar_k), x_k taken from the main scheme.
Point step_coupled_aux(double beta, const Point& x_main, double alpha, double gamma, const ContractionMap& f,
                       const MapFamily& fam, std::size_t k, const Point& xbar);

/// Normalized all-ones vector of dimension m.
Point default_direction(int m);

// ---- forcing for the basic scheme ----------------------------------------

/// z_k = g(k).
struct ExternalForcing {
  std::function<Point(std::size_t)> g;
};

/// z_k = gain x_k + offset(k).
struct FeedbackForcing {
  double gain = 0.0;
  std::function<Point(std::size_t)> offset;  // may be empty (zero)
};

/// z_0 given, z_{k+1} = z_k + ell(k, beta_k) (x_k - z_k). Makes the ratio
/// (z_{k+1} - z_k) / e_k equal to ell by construction.
struct IncrementForcing {
  Point z0;
  std::function<double(std::size_t, double)> ell;
};

using BasicForcing = std::variant<ExternalForcing, FeedbackForcing, IncrementForcing>;

// ---- configuration and trajectories --------------------------------------

struct SchemeConfig {
  SchemeKind kind = SchemeKind::basic;
  std::size_t horizon = 0;
  Point x0;
  std::optional<Point> xbar0;  // coupled_aux only; defaults to x0
  ScheduleSet schedules;
  std::optional<BasicForcing> forcing;    // basic
  std::optional<LipschitzMap> P;          // halpern
  std::optional<ContractionMap> f;        // viscosity, generalized, coupled_aux
  std::optional<MapFamily> family;        // viscosity, generalized, coupled_aux
  std::optional<MetricSystem> companion;  // optional for generalized, coupled_aux
  std::optional<AmbientSpace> space;
  bool clamp = false;  // project every iterate onto the space
  AuxVariant aux_variant = AuxVariant::main_iterate;
  std::optional<Point> direction;  // u; defaults to default_direction
  std::uint64_t seed = 0;

  int dim() const { return static_cast<int>(x0.size()); }
  /// Throws std::invalid_argument naming the first missing or inconsistent component.
  void validate() const;
};

struct TrajectoryMeta {
  std::size_t horizon = 0;
  bool clamp = false;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::optional<std::size_t> divergence_step;
  AuxVariant variant = AuxVariant::main_iterate;
  Point direction;
  double r = 0.0;
};

/// Recorded run. With n = x.size() - 1 completed steps:
///   x         n + 1 iterates
///   z         n values z_k
///   mapped    n values T_k(x_k) (or P x_k); empty for basic
///   fx        n values f(x_k); viscosity, generalized and coupled schemes only
///   lead      auxiliary trajectory only: the n points multiplied by beta_k
///   ell       n - 1 values, scalar schemes only
///   phi       n companion forcing values (0 without a companion)
///   coeffs    n coefficient snapshots
///   residual  n values: |T_k(x_k) - x_k| for map schemes, |x_{k+1} - x_k| for basic
struct Trajectory {
  SchemeKind scheme = SchemeKind::basic;
  bool aux = false;
  std::vector<Point> x;
  std::vector<Point> z;
  std::vector<Point> mapped;
  std::vector<Point> fx;
  std::vector<Point> lead;
  std::vector<double> ell;
  std::vector<double> phi;
  std::vector<StepCoefficients> coeffs;
  std::vector<double> residual;
  TrajectoryMeta meta;

  std::size_t steps() const { return x.empty() ? 0 : x.size() - 1; }
  int dim() const { return x.empty() ? 0 : static_cast<int>(x.front().size()); }
  bool scalar() const { return dim() == 1; }
  Point e(std::size_t k) const { return x[k] - z[k]; }
};

struct RunResult {
  Trajectory main;
  std::optional<Trajectory> aux;  // coupled_aux only

  bool diverged() const { return main.meta.diverged || (aux && aux->meta.diverged); }
};

/// Iterates the configured scheme for `horizon` steps. A non-finite iterate or
/// one with norm above kDivergenceNorm stops the run with meta.diverged set;
/// the partial trajectory is kept. Deterministic.
RunResult run(const SchemeConfig& cfg);

/// prod_{j<k} beta_j x0 + sum_{j<k} prod_{j<l<k} beta_l (1 - beta_j) z_j, summed
/// from the newest term backwards.
double closed_form_solution(const std::vector<double>& betas, const std::vector<double>& zs, double x0,
                            std::size_t k);
Point closed_form_solution(const std::vector<double>& betas, const std::vector<Point>& zs, const Point& x0,
                           std::size_t k);

}  // namespace hlab
