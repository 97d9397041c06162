#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/iterators.hpp"
#include "hlab/mappings.hpp"
#include "hlab/report.hpp"
#include "hlab/schedules.hpp"

namespace hlab {

// Default tolerances: exact algebra, convergence tails, limsup estimates.
inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kTailTol = 1e-6;
inline constexpr double kLimsupTol = 1e-3;

/// limsup estimates use the last 20% of the samples, at least 50 (or all of them).
std::size_t limsup_window(std::size_t n);
/// Convergence tails use the last 10% of the samples, at least 1.
std::size_t tail_window(std::size_t n);

class NotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- scalar difference equation x_{k+1} = beta x + (1 - beta) z ------------
// Every check below first verifies that the recorded trajectory satisfies the
// recursion (defect <= kIdentityTol relative to the iterate scale) and fails
// otherwise.

/// Where 0 <= e_k <= 2x_k/(1-beta_k) (mirrored for x_k <= 0), asserts
/// x_{k+1}^2 <= x_k^2 + tol. If the strict band holds at every step, also
/// asserts |x_k| nonincreasing and |x_n| <= tol.
DiagnosticReport check_band_monotone(const Trajectory& t, double tol);

/// Where ell_k lies in [beta_k - 1, beta_k + 1], asserts e_{k+1}^2 <= e_k^2 + tol.
/// If ell_k is strictly inside from some k1 on, asserts the tail of |e_k| <= tol.
DiagnosticReport check_error_band(const Trajectory& t, double tol);

/// For x_0 >= 0 and z_k >= 0: asserts x_k >= 0, and the error bounds of the
/// band ell_k in [0, 1 - beta_k] as in check_error_band.
DiagnosticReport check_positive_band(const Trajectory& t, double tol);

struct BoundednessParams {
  int which = 2;            // 1: summable z, 2: beta_k <= b < 1, 3: |z_k| <= b0 |x_k|
  double beta_bound = 0.0;  // b (cases 2 and 3)
  double beta0 = 0.0;       // b0 (case 3)
  double tol = kTailTol;
};

/// Cases 1 and 2 assert sup |x_k| below twice the analytic bound
/// (|x0| + 2 sum |z| and |x0| + 2 max|z|/(1-b)). Case 3 asserts strict decrease
/// of |x_k| and a tail below tol.
DiagnosticReport check_boundedness(const Trajectory& t, const BoundednessParams& p);

struct VenterParams {
  double tol = 1e-2;
  double min_mass = 10.0;  // required sum of (1 - beta_k) over the horizon
};

/// beta -> 1 with divergent sum of (1 - beta), nonnegative data and summable
/// (1 - beta) z: asserts the tail of |x_k| <= tol. Inconclusive when beta is
/// not certified from its closed form, the horizon carries too little mass, or
/// the weighted forcing has not visibly settled.
DiagnosticReport check_venter(const Trajectory& t, const Schedule& beta, const VenterParams& p);

/// Tail-window estimate of limsup (|z_{k+1} - z_k| - |x_{k+1} - x_k|) <= tol.
DiagnosticReport check_suzuki(const Trajectory& t, double tol);

/// Componentwise x_k >= 0 given x_0 >= 0.
DiagnosticReport check_positivity(const Trajectory& t);

// ---- generalized scheme ----------------------------------------------------

/// Tails over the last 10% of |x_{k+1} - x_k|, |x_k - z_k|,
/// |gamma_k T_k(x_k)/(1 - beta_k) - x_k| and |T_k(x_k) - x_k|, each <= tol.
DiagnosticReport check_residual_vanishes(const Trajectory& t, const MapFamily& fam, double tol);

enum class FixedPointMethod { last_iterate, tail_average };

struct FixedPointEstimate {
  Point x;
  double residual = 0.0;  // |T(x) - x|
  FixedPointMethod method = FixedPointMethod::tail_average;
  std::size_t window = 0;
};

/// Average of the last `window` iterates (window 1: the last iterate).
/// Throws NotConverged when an increment in the window exceeds settle_tol.
FixedPointEstimate estimate_fixed_point(const Trajectory& t, const LipschitzMap& limit, std::size_t window,
                                        double settle_tol);
DiagnosticReport check_fixed_point(const FixedPointEstimate& est, double tol);

/// Iterates T_inf from sampled starts in the space to collect fixed points y
/// and asserts <f(x*) - x*, y - x*> <= tol. pass-vacuous when no fixed point
/// distinct from x* turns up.
DiagnosticReport check_variational_inequality(const Point& xstar, const ContractionMap& f, const MapFamily& fam,
                                              const AmbientSpace& space, std::size_t n_samples, std::uint64_t seed,
                                              double tol);
/// Same inequality over explicit candidates; candidates that are not fixed
/// points of `limit` (residual > fixed_tol) are skipped and counted.
DiagnosticReport check_variational_inequality(const Point& xstar, const ContractionMap& f, const LipschitzMap& limit,
                                              const std::vector<Point>& candidates, double tol,
                                              double fixed_tol = 1e-12);

/// S_{k+1} = beta_k S_k + phi_k + delta_k r from S_0 = 0, and
/// D_k = |(x_k - xbar_k) - S_k u|. Pass/fail only when phi == 0 and r == 0;
/// otherwise a measurement. With constant beta and r != 0 it also records the
/// limit comparison x_n - xbar_n against r / (1 - beta) along u.
DiagnosticReport check_offset_series(const Trajectory& main, const Trajectory& aux, double tol,
                                     std::vector<double>* curve = nullptr);

/// d0 = max over k >= k0 of max(|x_k|, |T_k(x_k)|). Fails on divergence.
DiagnosticReport check_permanence(const Trajectory& t, std::size_t k0);

/// |(x_n - x_0) - sum_j increment_j| <= tol, with each increment rebuilt from
/// the recorded right-hand side and summed with compensation.
DiagnosticReport check_telescoping(const Trajectory& t, double tol);

}  // namespace hlab
