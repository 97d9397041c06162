#include "hlab/mappings.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/SVD>

namespace hlab {

AmbientSpace AmbientSpace::ball(Point center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ambient space needs dimension >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("ball radius must be positive and finite");
  if (!center.allFinite()) throw std::invalid_argument("ball center must be finite");
  AmbientSpace s;
  s.ball_ = true;
  s.radius_ = radius;
  s.lo_ = center.array() - radius;
  s.hi_ = center.array() + radius;
  s.center_ = std::move(center);
  return s;
}

AmbientSpace AmbientSpace::box(Point lo, Point hi) {
  if (lo.size() == 0 || lo.size() != hi.size()) throw std::invalid_argument("box bounds must have equal nonzero size");
  if (!lo.allFinite() || !hi.allFinite()) throw std::invalid_argument("box bounds must be finite");
  if ((lo.array() > hi.array()).any()) throw std::invalid_argument("box is empty (lo > hi)");
  AmbientSpace s;
  s.ball_ = false;
  s.center_ = 0.5 * (lo + hi);
  s.radius_ = 0.5 * (hi - lo).norm();
  s.lo_ = std::move(lo);
  s.hi_ = std::move(hi);
  return s;
}

double AmbientSpace::diameter() const { return ball_ ? 2.0 * radius_ : (hi_ - lo_).norm(); }

bool AmbientSpace::contains(const Point& x, double tol) const {
  if (x.size() != lo_.size()) return false;
  if (ball_) return (x - center_).norm() <= radius_ + tol;
  return (x.array() >= lo_.array() - tol).all() && (x.array() <= hi_.array() + tol).all();
}

Point AmbientSpace::project(const Point& x) const {
  if (ball_) {
    const Point d = x - center_;
    const double n = d.norm();
    if (n <= radius_) return x;
    return center_ + (radius_ / n) * d;
  }
  return x.cwiseMax(lo_).cwiseMin(hi_);
}

Point AmbientSpace::sample(std::mt19937_64& rng) const {
  const int m = dim();
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point x(m);
  if (!ball_) {
    for (int i = 0; i < m; ++i) x[i] = lo_[i] + (hi_[i] - lo_[i]) * unif(rng);
    return x;
  }
  std::normal_distribution<double> gauss(0.0, 1.0);
  double n = 0.0;
  do {
    for (int i = 0; i < m; ++i) x[i] = gauss(rng);
    n = x.norm();
  } while (n == 0.0);
  const double r = radius_ * std::pow(unif(rng), 1.0 / m);
  return center_ + (r / n) * x;
}

LipschitzMap LipschitzMap::affine(Matrix A, Point b) {
  if (A.rows() != A.cols() || A.rows() != b.size() || b.size() == 0) {
    throw std::invalid_argument("affine map needs a square matrix matching the offset size");
  }
  if (!A.allFinite() || !b.allFinite()) throw std::invalid_argument("affine map entries must be finite");
  LipschitzMap f;
  f.kind_ = MapKind::affine;
  f.m_ = static_cast<int>(b.size());
  Eigen::JacobiSVD<Matrix> svd(A);
  f.lipschitz_ = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  f.A_ = std::move(A);
  f.b_ = std::move(b);
  return f;
}

LipschitzMap LipschitzMap::identity(int m) { return affine(Matrix::Identity(m, m), Point::Zero(m)); }

LipschitzMap LipschitzMap::zero(int m) { return affine(Matrix::Zero(m, m), Point::Zero(m)); }

LipschitzMap LipschitzMap::constant(Point c) {
  const auto m = c.size();
  return affine(Matrix::Zero(m, m), std::move(c));
}

LipschitzMap LipschitzMap::box_projection(Point lo, Point hi) {
  if (lo.size() == 0 || lo.size() != hi.size()) throw std::invalid_argument("projection bounds must have equal size");
  if ((lo.array() > hi.array()).any()) throw std::invalid_argument("projection box is empty");
  LipschitzMap f;
  f.kind_ = MapKind::box_projection;
  f.m_ = static_cast<int>(lo.size());
  f.lipschitz_ = 1.0;
  f.lo_ = std::move(lo);
  f.hi_ = std::move(hi);
  return f;
}

LipschitzMap LipschitzMap::callable(int m, Fn fn, double lipschitz) {
  if (m < 1) throw std::invalid_argument("callable map needs dimension >= 1");
  if (!fn) throw std::invalid_argument("callable map needs a function");
  if (!(lipschitz >= 0.0) || !std::isfinite(lipschitz)) throw std::invalid_argument("Lipschitz constant must be finite and >= 0");
  LipschitzMap f;
  f.kind_ = MapKind::callable;
  f.m_ = m;
  f.lipschitz_ = lipschitz;
  f.fn_ = std::move(fn);
  return f;
}

Point LipschitzMap::operator()(const Point& x) const {
  if (x.size() != m_) {
    throw std::invalid_argument("map of dimension " + std::to_string(m_) + " applied to a point of dimension " +
                                std::to_string(x.size()));
  }
  Point y;
  switch (kind_) {
    case MapKind::affine:
      y = A_ * x + b_;
      break;
    case MapKind::box_projection:
      y = x.cwiseMax(lo_).cwiseMin(hi_);
      break;
    case MapKind::callable:
      y = fn_(x);
      if (y.size() != m_) throw std::invalid_argument("callable map returned a point of the wrong dimension");
      break;
  }
  if (!y.allFinite()) throw NonFiniteError("map produced a non-finite image");
  return y;
}

ContractionMap::ContractionMap(LipschitzMap map) : ContractionMap(map, map.lipschitz()) {}

ContractionMap::ContractionMap(LipschitzMap map, double bound) : map_(std::move(map)), bound_(bound) {
  if (!(bound_ >= 0.0 && bound_ < 1.0)) {
    throw std::invalid_argument("contraction bound must lie in [0,1), got " + std::to_string(bound_));
  }
  if (map_.lipschitz() > bound_ + 1e-12) {
    throw std::invalid_argument("map Lipschitz constant " + std::to_string(map_.lipschitz()) +
                                " exceeds the contraction bound");
  }
}

Point apply_contraction(const ContractionMap& f, const Point& x) { return f(x); }

MapFamily::MapFamily(LipschitzMap limit, LipschitzMap perturbation, Schedule eta)
    : limit_(std::move(limit)), perturbation_(std::move(perturbation)), eta_(std::move(eta)) {
  if (limit_.dim() != perturbation_.dim()) throw std::invalid_argument("family limit and perturbation dimensions differ");
}

MapFamily::MapFamily(LipschitzMap limit) : MapFamily(limit, LipschitzMap::zero(limit.dim()), Schedule()) {}

Point MapFamily::operator()(std::size_t k, const Point& x) const {
  const double e = eta_(k);
  if (e == 0.0) return limit_(x);
  Point y = limit_(x) + e * perturbation_(x);
  if (!y.allFinite()) throw NonFiniteError("family produced a non-finite image");
  return y;
}

double MapFamily::lipschitz_bound(std::size_t k) const {
  return limit_.lipschitz() + std::abs(eta_(k)) * perturbation_.lipschitz();
}

LipschitzMap MapFamily::at(std::size_t k) const {
  const double e = eta_(k);
  if (limit_.kind() == MapKind::affine && perturbation_.kind() == MapKind::affine) {
    return LipschitzMap::affine(limit_.A() + e * perturbation_.A(), limit_.b() + e * perturbation_.b());
  }
  MapFamily copy = *this;
  return LipschitzMap::callable(
      dim(), [copy, k](const Point& x) { return copy(k, x); }, lipschitz_bound(k));
}

Point apply_family(const MapFamily& fam, std::size_t k, const Point& x) { return fam(k, x); }

namespace {

std::vector<Point> draw(const AmbientSpace& space, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(space.sample(rng));
  return pts;
}

void check_dims(int map_dim, const AmbientSpace& space) {
  if (map_dim != space.dim()) throw std::invalid_argument("map and ambient space dimensions differ");
}

}  // namespace

double estimate_lipschitz(const LipschitzMap& map, const AmbientSpace& space, std::size_t n_samples,
                          std::uint64_t seed) {
  if (n_samples < 2) throw std::invalid_argument("estimate_lipschitz needs n_samples >= 2");
  check_dims(map.dim(), space);
  const auto pts = draw(space, n_samples, seed);
  std::vector<Point> img;
  img.reserve(pts.size());
  for (const auto& p : pts) img.push_back(map(p));

  double best = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dx = (pts[i] - pts[j]).norm();
      if (dx == 0.0) continue;
      ++used;
      best = std::max(best, (img[i] - img[j]).norm() / dx);
    }
  }
  if (used == 0) throw std::runtime_error("degenerate sample: every sampled pair coincides");
  return best;
}

double family_drift(const MapFamily& fam, std::size_t k, const AmbientSpace& space, std::size_t n_samples,
                    std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("family_drift needs n_samples >= 1");
  check_dims(fam.dim(), space);
  double best = 0.0;
  for (const auto& x : draw(space, n_samples, seed)) best = std::max(best, (fam(k + 1, x) - fam(k, x)).norm());
  return best;
}

ExpansionQuotient expansion_quotient(const MapFamily& fam, const Schedule& alpha, const Schedule& delta,
                                     const std::vector<std::size_t>& ks, const AmbientSpace& space,
                                     std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 1) throw std::invalid_argument("expansion_quotient needs n_samples >= 1");
  check_dims(fam.dim(), space);
  const auto xs = draw(space, n_samples, seed);
  const auto ys = draw(space, n_samples, seed ^ 0x9e3779b97f4a7c15ULL);
  ExpansionQuotient out;
  for (std::size_t k : ks) {
    const double m = std::min(alpha(k), delta(k));
    if (!(m > 0.0)) {
      out.skipped.push_back(k);
      continue;
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double dx = (xs[i] - ys[i]).norm();
      if (dx == 0.0) continue;
      const Point tx = fam(k, xs[i]), ty = fam(k, ys[i]);
      double excess = (tx - ty).norm() - dx;
      // Excess at rounding level is not expansion; dividing it by a tiny m would
      // turn float noise into a large quotient.
      const double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                           (xs[i].norm() + ys[i].norm() + tx.norm() + ty.norm() + dx);
      if (std::abs(excess) <= noise) excess = 0.0;
      const double q = excess / m;
      if (q > out.max_quotient) {
        out.max_quotient = q;
        out.worst_k = k;
      }
    }
  }
  return out;
}

}  // namespace hlab
