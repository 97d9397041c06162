#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hlab/mappings.hpp"
#include "hlab/report.hpp"
#include "hlab/schedules.hpp"
#include "hlab/types.hpp"

namespace hlab {

enum class MetricKind { euclidean, weighted_max };

/// Metric on the companion space W = R^n.
class Metric {
 public:
  static Metric euclidean();
  /// max_i w_i |a_i - b_i|, every w_i > 0.
  static Metric weighted_max(Point weights);

  double operator()(const Point& a, const Point& b) const;
  MetricKind kind() const { return kind_; }
  const Point& weights() const { return w_; }

 private:
  MetricKind kind_ = MetricKind::euclidean;
  Point w_;
};

/// Continuous nondecreasing map [0,inf) -> [0,inf) vanishing at 0.
struct ComparisonFunction {
  std::string name;
  std::function<double(double)> fn;

  /// t -> c t
  static ComparisonFunction linear(double c);
  /// t -> c t^p
  static ComparisonFunction power(double c, double p);

  double operator()(double t) const { return fn(t); }
};

struct FunctionPair {
  ComparisonFunction phi;  // measures distances
  ComparisonFunction psi;  // guaranteed decrease
};

/// Companion system (W, d, Q, pairs, omega0, p) forcing the main scheme through
/// delayed distances d(omega_k, omega_{k-p}).
class MetricSystem {
 public:
  MetricSystem(Metric d, LipschitzMap Q, std::vector<FunctionPair> pairs, Point omega0, std::size_t delay);

  /// Q(w) = c w + b with the pair phi(t) = t, psi(t) = (1 - c) t, under which
  /// the weak-contraction inequality is the Banach condition.
  static MetricSystem banach(double c, Point omega0, std::size_t delay, Point offset = Point());

  int dim() const { return static_cast<int>(omega0_.size()); }
  const Metric& metric() const { return d_; }
  const LipschitzMap& Q() const { return Q_; }
  const std::vector<FunctionPair>& pairs() const { return pairs_; }
  const Point& omega0() const { return omega0_; }
  std::size_t delay() const { return p_; }

 private:
  Metric d_;
  LipschitzMap Q_;
  std::vector<FunctionPair> pairs_;
  Point omega0_;
  std::size_t p_;
};

/// Last p+1 companion iterates. Indices below zero read as omega0.
class OmegaHistory {
 public:
  explicit OmegaHistory(const MetricSystem& sys);

  std::size_t index() const { return k_; }
  const Point& current() const;
  /// omega_{k-p}
  const Point& lagged() const;
  void advance(Point next);

 private:
  std::vector<Point> ring_;
  std::size_t head_ = 0;  // slot of omega_k
  std::size_t k_ = 0;
};

/// Appends Q(omega_k). Throws NonFiniteError on a non-finite image.
OmegaHistory step_omega(const MetricSystem& sys, OmegaHistory hist);

/// sum_{i < s_k} v_i(k) phi_i(d(omega_k, omega_{k-p})); 0 when s_k = 0.
/// Throws std::invalid_argument if s_k exceeds the pair or weight count, or
/// if hist is not at index k.
double phi_forcing(const MetricSystem& sys, const OmegaHistory& hist, std::size_t k, const std::vector<Schedule>& v,
                   std::size_t s_k);

/// Samples pairs (y, z) around omega0 and reports, per function pair, the max of
/// phi(d(Qy,Qz)) - phi(d(y,z)) + psi(d(y,z)). Also checks on a grid that each
/// phi, psi is nondecreasing and vanishes exactly at 0. Conforming iff every
/// violation is <= tol.
DiagnosticReport validate_weak_contraction(const MetricSystem& sys, std::size_t n_samples, std::uint64_t seed,
                                           double tol);

/// d(omega_k, omega_{k-p}) for k = p..horizon. Requires horizon > p.
std::vector<double> companion_distance_series(const MetricSystem& sys, std::size_t horizon);

}  // namespace hlab
