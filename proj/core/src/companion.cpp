#include "hlab/companion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace hlab {

Metric Metric::euclidean() { return Metric(); }

Metric Metric::weighted_max(Point weights) {
  if (weights.size() == 0 || !(weights.array() > 0.0).all() || !weights.allFinite()) {
    throw std::invalid_argument("weighted max metric needs finite positive weights");
  }
  Metric d;
  d.kind_ = MetricKind::weighted_max;
  d.w_ = std::move(weights);
  return d;
}

double Metric::operator()(const Point& a, const Point& b) const {
  if (a.size() != b.size()) throw std::invalid_argument("metric applied to points of different dimension");
  if (kind_ == MetricKind::euclidean) return (a - b).norm();
  if (w_.size() != a.size()) throw std::invalid_argument("metric weights do not match the point dimension");
  return (w_.array() * (a - b).array().abs()).maxCoeff();
}

ComparisonFunction ComparisonFunction::linear(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("linear comparison function needs c > 0");
  return {"linear(" + std::to_string(c) + ")", [c](double t) { return c * t; }};
}

ComparisonFunction ComparisonFunction::power(double c, double p) {
  if (!(c > 0.0) || !(p > 0.0) || !std::isfinite(c) || !std::isfinite(p)) {
    throw std::invalid_argument("power comparison function needs c > 0 and p > 0");
  }
  return {"power(" + std::to_string(c) + "," + std::to_string(p) + ")",
          [c, p](double t) { return c * std::pow(t, p); }};
}

MetricSystem::MetricSystem(Metric d, LipschitzMap Q, std::vector<FunctionPair> pairs, Point omega0,
                           std::size_t delay)
    : d_(std::move(d)), Q_(std::move(Q)), pairs_(std::move(pairs)), omega0_(std::move(omega0)), p_(delay) {
  if (p_ < 1) throw std::invalid_argument("companion delay p must be >= 1");
  if (omega0_.size() == 0 || !omega0_.allFinite()) throw std::invalid_argument("omega0 must be a finite point");
  if (Q_.dim() != omega0_.size()) throw std::invalid_argument("companion map and omega0 dimensions differ");
  for (const auto& pr : pairs_) {
    if (!pr.phi.fn || !pr.psi.fn) throw std::invalid_argument("companion function pair is empty");
  }
}

MetricSystem MetricSystem::banach(double c, Point omega0, std::size_t delay, Point offset) {
  if (!(c >= 0.0 && c < 1.0)) throw std::invalid_argument("Banach modulus must lie in [0,1)");
  const auto n = omega0.size();
  if (offset.size() == 0) offset = Point::Zero(n);
  LipschitzMap Q = LipschitzMap::affine(c * Matrix::Identity(n, n), std::move(offset));
  std::vector<FunctionPair> pairs;
  pairs.push_back({ComparisonFunction::linear(1.0), ComparisonFunction::linear(1.0 - c)});
  return MetricSystem(Metric::euclidean(), std::move(Q), std::move(pairs), std::move(omega0), delay);
}

OmegaHistory::OmegaHistory(const MetricSystem& sys) : ring_(sys.delay() + 1, sys.omega0()) {}

const Point& OmegaHistory::current() const { return ring_[head_]; }

const Point& OmegaHistory::lagged() const { return ring_[(head_ + 1) % ring_.size()]; }

void OmegaHistory::advance(Point next) {
  head_ = (head_ + 1) % ring_.size();
  ring_[head_] = std::move(next);
  ++k_;
}

OmegaHistory step_omega(const MetricSystem& sys, OmegaHistory hist) {
  hist.advance(sys.Q()(hist.current()));
  return hist;
}

double phi_forcing(const MetricSystem& sys, const OmegaHistory& hist, std::size_t k, const std::vector<Schedule>& v,
                   std::size_t s_k) {
  if (s_k == 0) return 0.0;
  if (s_k > sys.pairs().size()) {
    throw std::invalid_argument("s_k=" + std::to_string(s_k) + " exceeds the " + std::to_string(sys.pairs().size()) +
                                " configured function pairs");
  }
  if (s_k > v.size()) throw std::invalid_argument("s_k exceeds the number of weight schedules");
  if (hist.index() != k) {
    throw std::invalid_argument("companion history is at index " + std::to_string(hist.index()) + ", not " +
                                std::to_string(k));
  }
  const double dist = sys.metric()(hist.current(), hist.lagged());
  double total = 0.0;
  for (std::size_t i = 0; i < s_k; ++i) total += v[i](k) * sys.pairs()[i].phi(dist);
  return total;
}

namespace {

std::vector<double> comparison_grid() {
  std::vector<double> g{0.0};
  constexpr int n = 64;
  for (int j = 0; j < n; ++j) g.push_back(std::pow(10.0, -6.0 + 9.0 * j / (n - 1)));
  return g;
}

// Count grid points where f is decreasing, negative, or vanishes away from 0.
std::size_t shape_defects(const ComparisonFunction& f, const std::vector<double>& grid) {
  std::size_t bad = 0;
  double prev = -1.0;
  for (double t : grid) {
    const double y = f(t);
    if (!std::isfinite(y) || y < 0.0 || y < prev) ++bad;
    if ((t == 0.0) != (y == 0.0)) ++bad;
    prev = y;
  }
  return bad;
}

}  // namespace

DiagnosticReport validate_weak_contraction(const MetricSystem& sys, std::size_t n_samples, std::uint64_t seed,
                                           double tol) {
  if (n_samples < 1) throw std::invalid_argument("validate_weak_contraction needs n_samples >= 1");
  DiagnosticReport r("weak_contraction");
  r.tolerance("violation", tol);

  // Bounded sampling region around omega0 that also covers its first image.
  const Point& w0 = sys.omega0();
  const double radius = 1.0 + w0.norm() + (sys.Q()(w0) - w0).norm();
  const AmbientSpace region = AmbientSpace::ball(w0, radius);
  std::mt19937_64 rng(seed);
  std::vector<Point> ys, zs, qys, qzs;
  for (std::size_t s = 0; s < n_samples; ++s) {
    ys.push_back(region.sample(rng));
    zs.push_back(region.sample(rng));
    qys.push_back(sys.Q()(ys.back()));
    qzs.push_back(sys.Q()(zs.back()));
  }

  const auto grid = comparison_grid();
  bool ok = true;
  for (std::size_t i = 0; i < sys.pairs().size(); ++i) {
    const auto& pr = sys.pairs()[i];
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < n_samples; ++s) {
      const double dyz = sys.metric()(ys[s], zs[s]);
      const double dq = sys.metric()(qys[s], qzs[s]);
      worst = std::max(worst, pr.phi(dq) - pr.phi(dyz) + pr.psi(dyz));
    }
    const std::size_t defects = shape_defects(pr.phi, grid) + shape_defects(pr.psi, grid);
    const std::string tag = "pair" + std::to_string(i + 1);
    r.measure(tag + ".max_violation", worst);
    r.measure(tag + ".shape_defects", static_cast<double>(defects));
    if (worst > tol || defects > 0) {
      ok = false;
      r.note(tag + " (" + pr.phi.name + ", " + pr.psi.name + ") violates the weak-contraction inequality");
    }
  }
  if (sys.pairs().empty()) r.note("no function pairs configured");
  r.measure("region_radius", radius);
  r.status = ok ? Status::pass : Status::fail;
  return r;
}

std::vector<double> companion_distance_series(const MetricSystem& sys, std::size_t horizon) {
  if (horizon <= sys.delay()) throw std::invalid_argument("companion_distance_series needs horizon > p");
  std::vector<double> out;
  out.reserve(horizon - sys.delay() + 1);
  OmegaHistory hist(sys);
  for (std::size_t k = 0; k <= horizon; ++k) {
    if (k >= sys.delay()) out.push_back(sys.metric()(hist.current(), hist.lagged()));
    if (k < horizon) hist = step_omega(sys, std::move(hist));
  }
  return out;
}

}  // namespace hlab
