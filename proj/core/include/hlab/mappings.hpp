#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "hlab/schedules.hpp"
#include "hlab/types.hpp"

namespace hlab {

inline constexpr std::size_t kDefaultSamples = 512;

/// Bounded convex region C of R^m: a closed Euclidean ball or an axis-aligned box.
class AmbientSpace {
 public:
  static AmbientSpace ball(Point center, double radius);
  static AmbientSpace box(Point lo, Point hi);

  int dim() const { return static_cast<int>(lo_.size()); }
  bool is_ball() const { return ball_; }
  const Point& center() const { return center_; }
  double radius() const { return radius_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

  double diameter() const;
  bool contains(const Point& x, double tol = 0.0) const;
  /// Nearest point of C.
  Point project(const Point& x) const;
  /// Uniform sample from C.
  Point sample(std::mt19937_64& rng) const;

 private:
  AmbientSpace() = default;
  bool ball_ = true;
  Point center_;
  double radius_ = 0.0;
  Point lo_, hi_;  // bounding box, also kept for balls
};

enum class MapKind { affine, box_projection, callable };

/// Self-map of R^m with a known Lipschitz constant (Euclidean norm).
class LipschitzMap {
 public:
  using Fn = std::function<Point(const Point&)>;

  /// x -> A x + b, A square. Lipschitz constant is the spectral norm of A.
  static LipschitzMap affine(Matrix A, Point b);
  static LipschitzMap identity(int m);
  static LipschitzMap zero(int m);
  static LipschitzMap constant(Point c);
  /// Componentwise clamp onto [lo, hi]; nonexpansive.
  static LipschitzMap box_projection(Point lo, Point hi);
  /// User callable. `lipschitz` is trusted, not verified.
  static LipschitzMap callable(int m, Fn fn, double lipschitz);

  /// Throws NonFiniteError on a non-finite image.
  Point operator()(const Point& x) const;

  MapKind kind() const { return kind_; }
  int dim() const { return m_; }
  double lipschitz() const { return lipschitz_; }
  const Matrix& A() const { return A_; }
  const Point& b() const { return b_; }
  const Point& lo() const { return lo_; }
  const Point& hi() const { return hi_; }

 private:
  LipschitzMap() = default;
  MapKind kind_ = MapKind::affine;
  int m_ = 0;
  double lipschitz_ = 0.0;
  Matrix A_;
  Point b_;
  Point lo_, hi_;
  Fn fn_;
};

/// Lipschitz map with a declared contraction modulus in [0,1).
class ContractionMap {
 public:
  /// Uses map.lipschitz() as the bound.
  explicit ContractionMap(LipschitzMap map);
  /// Throws std::invalid_argument unless 0 <= bound < 1 and the map's own
  /// constant does not exceed it.
  ContractionMap(LipschitzMap map, double bound);

  Point operator()(const Point& x) const { return map_(x); }
  const LipschitzMap& map() const { return map_; }
  double lipschitz_bound() const { return bound_; }
  int dim() const { return map_.dim(); }

 private:
  LipschitzMap map_;
  double bound_;
};

Point apply_contraction(const ContractionMap& f, const Point& x);

/// T_k(x) = T_inf(x) + eta_k * G(x).
class MapFamily {
 public:
  MapFamily(LipschitzMap limit, LipschitzMap perturbation, Schedule eta);
  /// Constant family T_k = T_inf.
  explicit MapFamily(LipschitzMap limit);

  Point operator()(std::size_t k, const Point& x) const;
  /// L_inf + |eta_k| L_G.
  double lipschitz_bound(std::size_t k) const;
  /// T_k as a standalone map.
  LipschitzMap at(std::size_t k) const;

  const LipschitzMap& limit() const { return limit_; }
  const LipschitzMap& perturbation() const { return perturbation_; }
  const Schedule& eta() const { return eta_; }
  int dim() const { return limit_.dim(); }

 private:
  LipschitzMap limit_;
  LipschitzMap perturbation_;
  Schedule eta_;
};

Point apply_family(const MapFamily& fam, std::size_t k, const Point& x);

/// Max of |map(x) - map(y)| / |x - y| over all pairs of n_samples uniform
/// samples of C. A lower bound on the true constant. Throws
/// std::invalid_argument for n_samples < 2 and std::runtime_error when every
/// sampled pair coincides.
double estimate_lipschitz(const LipschitzMap& map, const AmbientSpace& space, std::size_t n_samples,
                          std::uint64_t seed);

/// Sampled sup over C of |T_{k+1}(x) - T_k(x)|.
double family_drift(const MapFamily& fam, std::size_t k, const AmbientSpace& space, std::size_t n_samples,
                    std::uint64_t seed);

struct ExpansionQuotient {
  /// Max over evaluated k of the sampled sup of
  /// (|T_k x - T_k y| - |x - y|) / min(alpha_k, delta_k). -inf if nothing was evaluated.
  double max_quotient = -std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0;
  std::vector<std::size_t> skipped;  // indices with min(alpha_k, delta_k) = 0
};

/// Asymptotic nonexpansiveness of the family measured against the slower of
/// alpha and delta. The caller compares max_quotient with a tolerance.
ExpansionQuotient expansion_quotient(const MapFamily& fam, const Schedule& alpha, const Schedule& delta,
                                     const std::vector<std::size_t>& ks, const AmbientSpace& space,
                                     std::size_t n_samples, std::uint64_t seed);

}  // namespace hlab
