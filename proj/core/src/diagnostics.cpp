#include "hlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace hlab {

namespace {

constexpr double kBandSlack = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

const char* kLimsupNote = "limsup estimated by the max over a tail window";

// Recorded steps must satisfy x_{k+1} = beta x_k + (1 - beta) z_k.
bool recursion_holds(const Trajectory& t, DiagnosticReport& r) {
  double worst = 0.0;
  for (std::size_t k = 0; k < t.steps(); ++k) {
    const double b = t.coeffs[k].beta;
    const Point pred = b * t.x[k] + (1.0 - b) * t.z[k];
    const double scale = std::max({1.0, t.x[k].norm(), t.z[k].norm()});
    worst = std::max(worst, (t.x[k + 1] - pred).norm() / scale);
  }
  r.measure("recursion_defect", worst);
  r.tolerance("recursion_defect", kIdentityTol);
  if (worst > kIdentityTol) {
    r.note("recorded trajectory does not satisfy the difference equation");
    r.status = Status::fail;
    return false;
  }
  return true;
}

bool require_scalar(const Trajectory& t, DiagnosticReport& r) {
  if (t.scalar() && t.steps() >= 1) return true;
  r.status = Status::inconclusive;
  r.note("needs a scalar trajectory with at least one step");
  return false;
}

double tail_abs(const std::vector<double>& v, std::size_t w) {
  double m = 0.0;
  for (std::size_t i = v.size() - std::min(w, v.size()); i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

// e_{k+1}^2 <= e_k^2 + tol wherever lo_k <= ell_k <= hi_k, and a vanishing tail
// once ell stays strictly inside. Shared by the error and positive bands.
template <class Lo, class Hi>
Status ell_band(const Trajectory& t, double tol, Lo lo, Hi hi, DiagnosticReport& r) {
  const std::size_t n = t.ell.size();
  std::vector<double> e(t.steps());
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = t.e(k)[0];

  std::size_t covered = 0, violations = 0, boundary = 0;
  double worst = -kInf, boundary_dev = 0.0;
  std::size_t k1 = n;  // first index of the final strictly-inside run
  std::size_t settled = 0;
  for (std::size_t k = 0; k < n; ++k) {
    // Once e_k is at rounding level ell_k is noise; such steps neither count
    // nor break a strictly-inside run.
    const double scale = std::max({1.0, std::abs(t.x[k][0]), std::abs(t.z[k][0])});
    if (std::abs(e[k]) <= 4.0 * std::numeric_limits<double>::epsilon() * scale) {
      ++settled;
      continue;
    }
    const double b = t.coeffs[k].beta;
    const double l = t.ell[k];
    const double a = lo(b), c = hi(b);
    const bool inside = l >= a - kBandSlack && l <= c + kBandSlack;
    const bool strict = l > a + kBandSlack && l < c - kBandSlack;
    if (strict) {
      if (k1 == n) k1 = k;
    } else {
      k1 = n;
    }
    if (!inside) continue;
    ++covered;
    const double growth = e[k + 1] * e[k + 1] - e[k] * e[k];
    worst = std::max(worst, growth);
    if (growth > tol) ++violations;
    if (!strict) {
      ++boundary;
      boundary_dev = std::max(boundary_dev, std::abs(growth));
    }
  }
  r.measure("coverage", n > settled ? static_cast<double>(covered) / (n - settled) : 0.0);
  r.measure("settled_steps", static_cast<double>(settled));
  if (covered == 0 && settled == n && n > 0) {
    r.measure("tail_abs_e", tail_abs(e, tail_window(e.size())));
    r.note("e_k at rounding level throughout");
    return tail_abs(e, tail_window(e.size())) <= tol ? Status::pass : Status::fail;
  }
  r.measure("violations", static_cast<double>(violations));
  r.measure("max_growth", covered ? worst : 0.0);
  r.measure("boundary_steps", static_cast<double>(boundary));
  r.measure("boundary_max_abs_growth", boundary_dev);
  if (covered == 0) {
    r.note("ell never entered the band");
    return Status::inconclusive;
  }
  Status st = violations == 0 ? Status::pass : Status::fail;
  const std::size_t w = tail_window(e.size());
  if (n > 0 && k1 + w <= e.size()) {
    const double tail = tail_abs(e, w);
    r.measure("strict_from_k", static_cast<double>(k1));
    r.measure("tail_abs_e", tail);
    if (tail > tol) st = Status::fail;
  } else {
    r.note("ell not strictly inside the band over the tail; only boundedness asserted");
  }
  return st;
}

double max_norm(const std::vector<Point>& v, std::size_t from, std::size_t to) {
  double m = 0.0;
  for (std::size_t i = from; i < to; ++i) m = std::max(m, v[i].norm());
  return m;
}

}  // namespace

std::size_t limsup_window(std::size_t n) {
  if (n == 0) return 0;
  return std::min(n, std::max<std::size_t>(50, n / 5));
}

std::size_t tail_window(std::size_t n) {
  if (n == 0) return 0;
  return std::max<std::size_t>(1, n / 10);
}

DiagnosticReport check_band_monotone(const Trajectory& t, double tol) {
  DiagnosticReport r("thm21/band_monotone");
  r.horizon = t.steps();
  r.tolerance("growth", tol).tolerance("tail", tol);
  if (!require_scalar(t, r) || !recursion_holds(t, r)) return r;

  const std::size_t n = t.steps();
  std::size_t covered = 0, violations = 0;
  bool strict_all = true;
  for (std::size_t k = 0; k < n; ++k) {
    const double x = t.x[k][0];
    const double e = x - t.z[k][0];
    const double b = t.coeffs[k].beta;
    if (b >= 1.0) {
      strict_all = false;
      continue;
    }
    const double w = 2.0 * x / (1.0 - b);
    bool band, strict;
    if (x > 0.0) {
      band = e >= 0.0 && e <= w;
      strict = e > 0.0 && e < w;
    } else {
      band = e >= w && e <= 0.0;
      strict = x == 0.0 ? e == 0.0 : (e > w && e < 0.0);
    }
    strict_all = strict_all && strict;
    if (!band) continue;
    ++covered;
    const double x1 = t.x[k + 1][0];
    if (x1 * x1 > x * x + tol) ++violations;
  }
  r.measure("coverage", static_cast<double>(covered) / n);
  r.measure("violations", static_cast<double>(violations));
  if (covered == 0) {
    r.status = Status::inconclusive;
    r.note("band condition never held");
    return r;
  }
  Status st = violations == 0 ? Status::pass : Status::fail;
  if (strict_all) {
    std::size_t increases = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (std::abs(t.x[k + 1][0]) > std::abs(t.x[k][0])) ++increases;
    }
    const double tail = std::abs(t.x.back()[0]);
    r.measure("monotone_breaks", static_cast<double>(increases));
    r.measure("tail_abs_x", tail);
    if (increases > 0 || tail > tol) st = Status::fail;
  } else {
    r.note("strict band not held at every step; only x^2 growth asserted");
  }
  r.status = st;
  return r;
}

DiagnosticReport check_error_band(const Trajectory& t, double tol) {
  DiagnosticReport r("thm21/error_band");
  r.horizon = t.steps();
  r.tolerance("growth", tol).tolerance("tail", tol);
  if (!require_scalar(t, r) || !recursion_holds(t, r)) return r;
  r.status = ell_band(
      t, tol, [](double b) { return b - 1.0; }, [](double b) { return b + 1.0; }, r);
  return r;
}

DiagnosticReport check_positive_band(const Trajectory& t, double tol) {
  DiagnosticReport r("thm21/positive_band");
  r.horizon = t.steps();
  r.tolerance("growth", tol).tolerance("tail", tol);
  if (!require_scalar(t, r) || !recursion_holds(t, r)) return r;
  double min_z = kInf;
  for (const auto& z : t.z) min_z = std::min(min_z, z[0]);
  r.measure("x0", t.x[0][0]).measure("min_z", min_z);
  if (t.x[0][0] < 0.0 || min_z < 0.0) {
    r.status = Status::inconclusive;
    r.note("needs x0 >= 0 and z_k >= 0");
    return r;
  }
  double min_x = kInf;
  for (const auto& x : t.x) min_x = std::min(min_x, x[0]);
  r.measure("min_x", min_x);
  if (min_x < 0.0) {
    r.status = Status::fail;
    r.note("iterate left the nonnegative half-line");
    return r;
  }
  const Status band = ell_band(
      t, tol, [](double) { return 0.0; }, [](double b) { return 1.0 - b; }, r);
  // Positivity is unconditional; the band only adds error bounds.
  r.status = band == Status::inconclusive ? Status::pass : band;
  return r;
}

DiagnosticReport check_boundedness(const Trajectory& t, const BoundednessParams& p) {
  DiagnosticReport r("thm21/boundedness_case" + std::to_string(p.which));
  r.horizon = t.steps();
  if (p.which < 1 || p.which > 3) throw std::invalid_argument("boundedness case must be 1, 2 or 3");
  if (t.steps() < 1) {
    r.status = Status::inconclusive;
    r.note("empty trajectory");
    return r;
  }
  if (!recursion_holds(t, r)) return r;
  const std::size_t n = t.steps();
  double max_abs_beta = 0.0, sum_z = 0.0, max_z = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    max_abs_beta = std::max(max_abs_beta, std::abs(t.coeffs[k].beta));
    sum_z += t.z[k].norm();
    max_z = std::max(max_z, t.z[k].norm());
  }
  const double x0 = t.x[0].norm();
  const double sup_x = max_norm(t.x, 0, t.x.size());
  r.measure("sup_abs_x", sup_x).measure("max_abs_beta", max_abs_beta);
  auto inconclusive = [&](const std::string& why) {
    r.status = Status::inconclusive;
    r.note(why);
    return r;
  };

  if (p.which == 1 || p.which == 2) {
    double bound;
    if (p.which == 1) {
      if (max_abs_beta > 1.0) return inconclusive("needs |beta_k| <= 1");
      bound = x0 + 2.0 * sum_z;
      r.measure("sum_abs_z", sum_z);
    } else {
      if (!(p.beta_bound < 1.0) || max_abs_beta > p.beta_bound) return inconclusive("needs |beta_k| <= b < 1");
      bound = x0 + 2.0 * max_z / (1.0 - p.beta_bound);
      r.measure("max_abs_z", max_z);
    }
    r.measure("analytic_bound", bound);
    r.tolerance("slack_factor", 2.0);
    r.status = (sup_x < kDivergenceNorm && sup_x <= 2.0 * bound) ? Status::pass : Status::fail;
    return r;
  }

  // case 3
  const double factor = p.beta_bound * (1.0 + 2.0 * p.beta0);
  r.measure("claimed_factor", factor);
  r.tolerance("tail", p.tol);
  if (!(p.beta0 > 0.0) || !(factor < 1.0)) return inconclusive("needs b0 > 0 and b (1 + 2 b0) < 1");
  if (max_abs_beta > p.beta_bound) return inconclusive("needs |beta_k| <= b");
  for (std::size_t k = 0; k < n; ++k) {
    if (t.z[k].norm() > p.beta0 * t.x[k].norm() * (1.0 + kBandSlack)) return inconclusive("needs |z_k| <= b0 |x_k|");
  }
  std::size_t breaks = 0;
  double max_ratio = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = t.x[k].norm();
    if (a == 0.0) continue;
    const double ratio = t.x[k + 1].norm() / a;
    max_ratio = std::max(max_ratio, ratio);
    if (!(ratio < 1.0)) ++breaks;
  }
  const double tail = t.x.back().norm();
  r.measure("max_ratio", max_ratio).measure("decrease_breaks", static_cast<double>(breaks));
  r.measure("tail_abs_x", tail);
  r.status = (breaks == 0 && tail <= p.tol) ? Status::pass : Status::fail;
  return r;
}

DiagnosticReport check_venter(const Trajectory& t, const Schedule& beta, const VenterParams& p) {
  DiagnosticReport r("thm21/venter");
  r.horizon = t.steps();
  r.tolerance("tail", p.tol).tolerance("min_mass", p.min_mass);
  auto inconclusive = [&](const std::string& why) {
    r.status = Status::inconclusive;
    r.note(why);
    return r;
  };
  if (t.meta.diverged) return inconclusive("trajectory diverged");
  if (t.steps() < 2) return inconclusive("too few steps");
  if (certify_venter_beta(beta) != Certainty::holds) {
    return inconclusive("beta not certified: needs 1 - beta_k -> 0 with divergent sum, got " + beta.describe());
  }
  if ((t.x[0].array() < 0.0).any()) return inconclusive("needs x0 >= 0");
  const std::size_t n = t.steps();
  double mass = 0.0, weighted = 0.0, late = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double b = t.coeffs[k].beta;
    if (b < 0.0 || b > 1.0) return inconclusive("needs beta_k in [0,1]");
    if ((t.z[k].array() < 0.0).any()) return inconclusive("needs z_k >= 0");
    mass += 1.0 - b;
    const double w = (1.0 - b) * t.z[k].norm();
    weighted += w;
    if (k >= n / 2) late += w;
  }
  r.measure("mass", mass).measure("weighted_forcing", weighted).measure("late_weighted_forcing", late);
  if (mass < p.min_mass) return inconclusive("horizon too short: sum of (1 - beta_k) below the required mass");
  if (late > 0.01 * std::max(1.0, weighted)) return inconclusive("weighted forcing sum has not settled");
  const double tail = max_norm(t.x, t.x.size() - tail_window(t.x.size()), t.x.size());
  r.measure("tail_abs_x", tail);
  r.status = tail <= p.tol ? Status::pass : Status::fail;
  return r;
}

DiagnosticReport check_suzuki(const Trajectory& t, double tol) {
  DiagnosticReport r("thm21/suzuki");
  r.horizon = t.steps();
  r.tolerance("limsup", tol);
  r.note(kLimsupNote);
  if (t.meta.diverged) {
    r.status = Status::inconclusive;
    r.note("trajectory diverged");
    return r;
  }
  if (t.z.size() < 2) {
    r.status = Status::inconclusive;
    r.note("too few steps");
    return r;
  }
  const std::size_t nd = t.z.size() - 1;
  const std::size_t w = limsup_window(nd);
  double est = -kInf, bmin = kInf, bmax = -kInf, xz = 0.0;
  for (std::size_t k = nd - w; k < nd; ++k) {
    const double d = (t.z[k + 1] - t.z[k]).norm() - (t.x[k + 1] - t.x[k]).norm();
    est = std::max(est, d);
    bmin = std::min(bmin, t.coeffs[k].beta);
    bmax = std::max(bmax, t.coeffs[k].beta);
    xz = std::max(xz, (t.x[k] - t.z[k]).norm());
  }
  r.measure("limsup_estimate", est).measure("window", static_cast<double>(w));
  r.measure("tail_min_beta", bmin).measure("tail_max_beta", bmax).measure("tail_x_minus_z", xz);
  if (!(bmin > 0.0 && bmax < 1.0)) {
    r.status = Status::inconclusive;
    r.note("needs 0 < liminf beta <= limsup beta < 1 over the window");
    return r;
  }
  r.status = est <= tol ? Status::pass : Status::fail;
  return r;
}

DiagnosticReport check_positivity(const Trajectory& t) {
  DiagnosticReport r(std::string(t.aux ? "aux/" : "") + "positivity");
  r.horizon = t.steps();
  if (t.x.empty() || (t.x[0].array() < 0.0).any()) {
    r.status = Status::inconclusive;
    r.note("needs x0 >= 0");
    return r;
  }
  double m = kInf;
  for (const auto& x : t.x) m = std::min(m, x.minCoeff());
  r.measure("min_component", m);
  r.status = m >= 0.0 ? Status::pass : Status::fail;
  return r;
}

DiagnosticReport check_residual_vanishes(const Trajectory& t, const MapFamily& fam, double tol) {
  DiagnosticReport r("thm42/residual_vanishes");
  r.horizon = t.steps();
  r.tolerance("tail", tol);
  if (t.meta.diverged || t.steps() < 10) {
    r.status = Status::inconclusive;
    r.note(t.meta.diverged ? "trajectory diverged" : "too few steps");
    return r;
  }
  const std::size_t n = t.steps();
  const std::size_t w = tail_window(n);
  double inc = 0.0, xz = 0.0, scaled = 0.0, res = 0.0;
  for (std::size_t k = n - w; k < n; ++k) {
    const Point& x = t.x[k];
    const Point tx = fam(k, x);
    const StepCoefficients& c = t.coeffs[k];
    inc = std::max(inc, (t.x[k + 1] - x).norm());
    xz = std::max(xz, (x - t.z[k]).norm());
    scaled = std::max(scaled, (c.gamma * tx / (1.0 - c.beta) - x).norm());
    res = std::max(res, (tx - x).norm());
  }
  r.measure("tail_increment", inc);
  r.measure("tail_x_minus_z", xz);
  r.measure("tail_scaled_map_minus_x", scaled);
  r.measure("tail_map_residual", res);
  r.measure("window", static_cast<double>(w));
  r.status = (inc <= tol && xz <= tol && scaled <= tol && res <= tol) ? Status::pass : Status::fail;
  return r;
}

FixedPointEstimate estimate_fixed_point(const Trajectory& t, const LipschitzMap& limit, std::size_t window,
                                        double settle_tol) {
  if (t.x.empty()) throw NotConverged("empty trajectory");
  if (t.meta.diverged) throw NotConverged("trajectory diverged");
  window = std::clamp<std::size_t>(window, 1, t.x.size());
  const std::size_t first = t.x.size() - window;
  double settle = 0.0;
  for (std::size_t k = (first > 0 ? first - 1 : 0); k + 1 < t.x.size(); ++k) {
    settle = std::max(settle, (t.x[k + 1] - t.x[k]).norm());
  }
  if (settle > settle_tol) {
    throw NotConverged("increments have not settled: " + std::to_string(settle) + " > " + std::to_string(settle_tol));
  }
  FixedPointEstimate est;
  est.window = window;
  if (window == 1) {
    est.x = t.x.back();
    est.method = FixedPointMethod::last_iterate;
  } else {
    est.x = Point::Zero(t.dim());
    for (std::size_t k = first; k < t.x.size(); ++k) est.x += t.x[k];
    est.x /= static_cast<double>(window);
    est.method = FixedPointMethod::tail_average;
  }
  est.residual = (limit(est.x) - est.x).norm();
  return est;
}

DiagnosticReport check_fixed_point(const FixedPointEstimate& est, double tol) {
  DiagnosticReport r("thm42/fixed_point");
  r.tolerance("residual", tol);
  r.measure("residual", est.residual).measure("window", static_cast<double>(est.window));
  for (int i = 0; i < est.x.size(); ++i) r.measure("x*_" + std::to_string(i + 1), est.x[i]);
  r.note(est.method == FixedPointMethod::last_iterate ? "last iterate" : "tail average");
  r.status = est.residual <= tol ? Status::pass : Status::fail;
  return r;
}

namespace {

DiagnosticReport vi_over(const Point& xstar, const ContractionMap& f, const std::vector<Point>& fixed,
                         std::size_t skipped, double tol) {
  DiagnosticReport r("thm42/variational_inequality");
  r.tolerance("inner_product", tol);
  const Point g = f(xstar) - xstar;
  double worst = -kInf;
  std::size_t distinct = 0, worst_i = 0;
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    const Point d = fixed[i] - xstar;
    if (d.norm() <= 1e-9) continue;
    ++distinct;
    const double v = g.dot(d);
    if (v > worst) {
      worst = v;
      worst_i = i;
    }
  }
  r.measure("candidates", static_cast<double>(fixed.size()));
  r.measure("skipped", static_cast<double>(skipped));
  r.measure("distinct_fixed_points", static_cast<double>(distinct));
  if (distinct == 0) {
    r.measure("max_inner_product", 0.0);
    r.status = fixed.empty() ? Status::inconclusive : Status::pass_vacuous;
    r.note(fixed.empty() ? "no fixed points found" : "no fixed point distinct from x*");
    return r;
  }
  r.measure("max_inner_product", worst);
  for (int i = 0; i < fixed[worst_i].size(); ++i) r.measure("worst_y_" + std::to_string(i + 1), fixed[worst_i][i]);
  r.status = worst <= tol ? Status::pass : Status::fail;
  return r;
}

}  // namespace

DiagnosticReport check_variational_inequality(const Point& xstar, const ContractionMap& f, const MapFamily& fam,
                                              const AmbientSpace& space, std::size_t n_samples, std::uint64_t seed,
                                              double tol) {
  const LipschitzMap& T = fam.limit();
  std::mt19937_64 rng(seed);
  std::vector<Point> fixed;
  std::size_t skipped = 0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Point y = space.sample(rng);
    bool settled = false;
    for (int it = 0; it < 10000; ++it) {
      Point ty = T(y);
      const double res = (ty - y).norm();
      y = std::move(ty);
      if (res <= 1e-13 * std::max(1.0, y.norm())) {
        settled = true;
        break;
      }
    }
    if (settled) {
      fixed.push_back(std::move(y));
    } else {
      ++skipped;
    }
  }
  DiagnosticReport r = vi_over(xstar, f, fixed, skipped, tol);
  r.measure("xstar_residual", (T(xstar) - xstar).norm());
  return r;
}

DiagnosticReport check_variational_inequality(const Point& xstar, const ContractionMap& f, const LipschitzMap& limit,
                                              const std::vector<Point>& candidates, double tol, double fixed_tol) {
  std::vector<Point> fixed;
  std::size_t skipped = 0;
  for (const auto& y : candidates) {
    if ((limit(y) - y).norm() <= fixed_tol) {
      fixed.push_back(y);
    } else {
      ++skipped;
    }
  }
  DiagnosticReport r = vi_over(xstar, f, fixed, skipped, tol);
  r.measure("xstar_residual", (limit(xstar) - xstar).norm());
  return r;
}

DiagnosticReport check_offset_series(const Trajectory& main, const Trajectory& aux, double tol,
                                     std::vector<double>* curve) {
  if (main.x.size() != aux.x.size()) throw std::invalid_argument("offset series needs trajectories of equal length");
  DiagnosticReport r("thm411/offset_series");
  r.horizon = main.steps();
  const std::size_t n = main.steps();
  const double rr = main.meta.r;
  const Point& u = main.meta.direction;
  bool exact = rr == 0.0;
  for (double p : main.phi) exact = exact && p == 0.0;

  double S = 0.0, max_d = 0.0, last_d = 0.0;
  if (curve) curve->clear();
  for (std::size_t k = 0; k <= n; ++k) {
    const double d = ((main.x[k] - aux.x[k]) - S * u).norm();
    max_d = std::max(max_d, d);
    last_d = d;
    if (curve) curve->push_back(d);
    if (k < n) S = main.coeffs[k].beta * S + main.phi[k] + main.coeffs[k].delta * rr;
  }
  r.measure("max_deviation", max_d).measure("final_deviation", last_d).measure("series_at_horizon", S);

  if (rr != 0.0 && n > 0) {
    const double b0 = main.coeffs.front().beta;
    bool constant_beta = true;
    for (const auto& c : main.coeffs) constant_beta = constant_beta && c.beta == b0;
    if (constant_beta && b0 < 1.0) {
      const double claimed = rr / (1.0 - b0);
      const double observed = (main.x.back() - aux.x.back()).dot(u);
      r.measure("claimed_offset", claimed).measure("observed_offset", observed);
      r.measure("offset_discrepancy", observed - claimed);
    }
  }
  if (exact) {
    r.tolerance("deviation", tol);
    r.status = max_d <= tol ? Status::pass : Status::fail;
  } else {
    r.status = Status::measured;
    r.note("forcing present: deviation recorded, not asserted");
  }
  return r;
}

DiagnosticReport check_permanence(const Trajectory& t, std::size_t k0) {
  DiagnosticReport r(std::string(t.aux ? "aux/" : "") + "thm42/permanence");
  r.horizon = t.steps();
  r.tolerance("guard", kDivergenceNorm);
  if (t.meta.diverged) {
    r.status = Status::fail;
    r.note("divergence at step " + std::to_string(t.meta.divergence_step.value_or(0)));
    if (!t.x.empty()) r.measure("last_norm", t.x.back().norm());
    return r;
  }
  if (k0 >= t.x.size()) {
    r.status = Status::inconclusive;
    r.note("k0 beyond the horizon");
    return r;
  }
  double d0 = max_norm(t.x, k0, t.x.size());
  if (k0 < t.mapped.size()) d0 = std::max(d0, max_norm(t.mapped, k0, t.mapped.size()));
  r.measure("empirical_diameter", d0).measure("k0", static_cast<double>(k0));
  r.status = (std::isfinite(d0) && d0 < kDivergenceNorm) ? Status::pass : Status::fail;
  return r;
}

DiagnosticReport check_telescoping(const Trajectory& t, double tol) {
  DiagnosticReport r(std::string(t.aux ? "aux/" : "") + "thm42/telescoping");
  r.horizon = t.steps();
  r.tolerance("identity", tol);
  const std::size_t n = t.steps();
  const int m = t.dim();
  const bool viscous = t.scheme == SchemeKind::viscosity || t.scheme == SchemeKind::generalized ||
                       t.scheme == SchemeKind::coupled_aux;
  if (viscous && (t.fx.size() < n || t.mapped.size() < n || (t.aux && t.lead.size() < n))) {
    throw std::invalid_argument("trajectory lacks the map records needed to rebuild increments");
  }
  Point sum = Point::Zero(m), comp = Point::Zero(m);
  for (std::size_t j = 0; j < n; ++j) {
    const StepCoefficients& c = t.coeffs[j];
    const Point& x = t.x[j];
    Point inc;
    if (!viscous) {
      inc = (1.0 - c.beta) * (t.z[j] - x);
    } else if (t.aux) {
      inc = c.alpha * t.fx[j] + c.beta * t.lead[j] - x + c.gamma * t.mapped[j];
    } else {
      inc = c.alpha * t.fx[j] + (c.beta - 1.0) * x + c.gamma * t.mapped[j] +
            (t.phi[j] + c.delta * t.meta.r) * t.meta.direction;
    }
    // Kahan summation, componentwise.
    const Point y = inc - comp;
    const Point s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  const double defect = n ? ((t.x[n] - t.x[0]) - sum).norm() : 0.0;
  r.measure("defect", defect).measure("total_displacement", n ? (t.x[n] - t.x[0]).norm() : 0.0);
  if (t.meta.clamp) r.note("clamp mode: projected iterates need not telescope");
  r.status = defect <= tol ? Status::pass : Status::fail;
  return r;
}

}  // namespace hlab
