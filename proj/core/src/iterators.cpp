#include "hlab/iterators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hlab {

namespace {

constexpr std::pair<SchemeKind, std::string_view> kSchemeNames[] = {
    {SchemeKind::basic, "basic"},
    {SchemeKind::halpern, "halpern"},
    {SchemeKind::viscosity, "viscosity"},
    {SchemeKind::generalized, "generalized"},
    {SchemeKind::coupled_aux, "coupled_aux"},
};

// Shared by step_generalized and run() so both evaluate in the same order.
Point compose_main(const StepCoefficients& c, const Point& fx, const Point& x, const Point& tx, double forcing,
                   const Point& u) {
  return c.alpha * fx + c.beta * x + c.gamma * tx + forcing * u;
}

// Same association as compose_main, minus the forcing term.
Point compose_aux(double alpha, const Point& fxb, double beta, const Point& xk, double gamma, const Point& txb) {
  return alpha * fxb + beta * xk + gamma * txb;
}

}  // namespace

std::string to_string(SchemeKind k) {
  for (const auto& [kind, name] : kSchemeNames) {
    if (kind == k) return std::string(name);
  }
  return "unknown";
}

std::optional<SchemeKind> parse_scheme_kind(std::string_view name) {
  for (const auto& [kind, n] : kSchemeNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

std::string to_string(AuxVariant v) { return v == AuxVariant::main_iterate ? "main_iterate" : "own_iterate"; }

Point step_basic(double beta, const Point& x, const Point& z) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("step_basic needs beta in [0,1]");
  if (x.size() != z.size()) throw std::invalid_argument("step_basic: x and z differ in dimension");
  return beta * x + (1.0 - beta) * z;
}

double error_step(double beta, double e, double z_next, double z_cur) { return beta * e - (z_next - z_cur); }

double compute_ell(double e, double z_cur, double z_next) { return e == 0.0 ? 1.0 : (z_next - z_cur) / e; }

Point step_halpern(double beta, const Point& x, const LipschitzMap& P) { return step_basic(beta, x, P(x)); }

Point step_generalized(const StepCoefficients& c, const ContractionMap& f, const MapFamily& fam, std::size_t k,
                       double phi_term, double r, const Point& x, const Point& u) {
  return compose_main(c, f(x), x, fam(k, x), phi_term + c.delta * r, u);
}

Point z_of_generalized(const StepCoefficients& c, const ContractionMap& f, const MapFamily& fam, std::size_t k,
                       double phi_term, double r, const Point& x, const Point& u) {
  if (!(c.beta < 1.0)) throw std::invalid_argument("z of the generalized scheme needs beta < 1");
  return (c.alpha * f(x) + c.gamma * fam(k, x) + (phi_term + c.delta * r) * u) / (1.0 - c.beta);
}

Point step_coupled_aux(double beta, const Point& x_main, double alpha, double gamma, const ContractionMap& f,
                       const MapFamily& fam, std::size_t k, const Point& xbar) {
  return compose_aux(alpha, f(xbar), beta, x_main, gamma, fam(k, xbar));
}

Point default_direction(int m) { return Point::Ones(m) / std::sqrt(static_cast<double>(m)); }

void SchemeConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
  if (horizon < 1) fail("horizon must be >= 1");
  if (x0.size() == 0 || !x0.allFinite()) fail("x0 must be a finite point");
  const int m = dim();
  if (clamp && !space) fail("clamp mode needs an ambient space");
  if (space) {
    if (space->dim() != m) fail("x0 and the ambient space differ in dimension");
    if (!space->contains(x0, 1e-12)) fail("x0 lies outside the ambient space");
  }
  if (direction && (direction->size() != m || !(direction->norm() > 0.0) || !direction->allFinite())) {
    fail("direction must be a nonzero finite vector of the ambient dimension");
  }
  try {
    schedules.beta(horizon - 1);
    if (kind != SchemeKind::basic && kind != SchemeKind::halpern) {
      schedules.alpha(horizon - 1);
      schedules.delta(horizon - 1);
      schedules.epsilon(horizon - 1);
      schedules.s(horizon - 1);
    }
  } catch (const std::out_of_range& e) {
    fail(std::string("a table schedule is shorter than the horizon: ") + e.what());
  }

  switch (kind) {
    case SchemeKind::basic:
      if (!forcing) fail("basic scheme needs a forcing block");
      if (const auto* inc = std::get_if<IncrementForcing>(&*forcing)) {
        if (inc->z0.size() != m) fail("increment forcing z0 has the wrong dimension");
        if (!inc->ell) fail("increment forcing needs an ell rule");
      }
      if (const auto* ext = std::get_if<ExternalForcing>(&*forcing); ext && !ext->g) fail("external forcing is empty");
      return;
    case SchemeKind::halpern:
      if (!P) fail("halpern scheme needs a map P");
      if (P->dim() != m) fail("P and x0 differ in dimension");
      return;
    case SchemeKind::viscosity:
    case SchemeKind::generalized:
    case SchemeKind::coupled_aux:
      break;
  }
  if (!f) fail(to_string(kind) + " scheme needs a contraction f");
  if (!family) fail(to_string(kind) + " scheme needs a map family");
  if (f->dim() != m || family->dim() != m) fail("f, the family and x0 must share one dimension");
  if (kind == SchemeKind::viscosity) return;
  const std::size_t s_max = schedules.s.max_value();
  if (s_max > 0) {
    if (!companion) fail("s_k > 0 needs a companion system");
    if (s_max > companion->pairs().size()) fail("s_k exceeds the number of companion function pairs");
    if (s_max > schedules.v.size()) fail("s_k exceeds the number of weight schedules v");
  }
  if (kind == SchemeKind::coupled_aux && xbar0 && (xbar0->size() != m || !xbar0->allFinite())) {
    fail("xbar0 must be a finite point of the ambient dimension");
  }
}

namespace {

Trajectory make_trajectory(const SchemeConfig& cfg, const Point& x0, const Point& u, bool aux) {
  Trajectory t;
  t.scheme = cfg.kind;
  t.aux = aux;
  t.meta.horizon = cfg.horizon;
  t.meta.clamp = cfg.clamp;
  t.meta.seed = cfg.seed;
  t.meta.variant = cfg.aux_variant;
  t.meta.direction = u;
  t.meta.r = aux ? 0.0 : cfg.schedules.r;
  t.x.reserve(cfg.horizon + 1);
  t.z.reserve(cfg.horizon);
  t.coeffs.reserve(cfg.horizon);
  t.x.push_back(x0);
  return t;
}

void mark_diverged(Trajectory& t, std::size_t k) {
  t.meta.diverged = true;
  t.meta.divergence_step = k;
}

// Records step k and appends x_{k+1}. Returns false once the run must stop.
bool commit(Trajectory& t, std::size_t k, Point x_next, Point z, const StepCoefficients& c, double phi,
            double residual) {
  if (!x_next.allFinite()) {
    mark_diverged(t, k);
    return false;
  }
  t.z.push_back(std::move(z));
  t.coeffs.push_back(c);
  t.phi.push_back(phi);
  t.residual.push_back(residual);
  const bool blown = x_next.norm() > kDivergenceNorm;
  t.x.push_back(std::move(x_next));
  if (blown) mark_diverged(t, k);
  return !blown;
}

void fill_ell(Trajectory& t) {
  if (!t.scalar() || t.z.size() < 2) return;
  t.ell.reserve(t.z.size() - 1);
  for (std::size_t k = 0; k + 1 < t.z.size(); ++k) t.ell.push_back(compute_ell(t.e(k)[0], t.z[k][0], t.z[k + 1][0]));
}

// Keep n steps; also drops map records of a step whose image was rejected.
void truncate(Trajectory& t, std::size_t n) {
  t.x.resize(std::min(t.x.size(), n + 1));
  t.z.resize(std::min(t.z.size(), n));
  t.mapped.resize(std::min(t.mapped.size(), n));
  t.fx.resize(std::min(t.fx.size(), n));
  t.lead.resize(std::min(t.lead.size(), n));
  t.phi.resize(std::min(t.phi.size(), n));
  t.coeffs.resize(std::min(t.coeffs.size(), n));
  t.residual.resize(std::min(t.residual.size(), n));
}

Point maybe_clamp(const SchemeConfig& cfg, Point x) {
  if (cfg.clamp && x.allFinite()) return cfg.space->project(x);
  return x;
}

RunResult run_basic(const SchemeConfig& cfg, const Point& u) {
  Trajectory t = make_trajectory(cfg, cfg.x0, u, false);
  const BasicForcing& forcing = *cfg.forcing;
  Point z_prev;
  for (std::size_t k = 0; k < cfg.horizon; ++k) {
    const Point& x = t.x.back();
    const double beta = cfg.schedules.beta(k);
    Point z;
    if (const auto* ext = std::get_if<ExternalForcing>(&forcing)) {
      z = ext->g(k);
    } else if (const auto* fb = std::get_if<FeedbackForcing>(&forcing)) {
      z = fb->gain * x;
      if (fb->offset) z += fb->offset(k);
    } else {
      const auto& inc = std::get<IncrementForcing>(forcing);
      if (k == 0) {
        z = inc.z0;
      } else {
        const double b_prev = cfg.schedules.beta(k - 1);
        z = z_prev + inc.ell(k - 1, b_prev) * (t.x[k - 1] - z_prev);
      }
    }
    if (z.size() != x.size()) throw std::invalid_argument("forcing produced a point of the wrong dimension");
    if (!z.allFinite()) {
      mark_diverged(t, k);
      break;
    }
    Point x_next = maybe_clamp(cfg, step_basic(beta, x, z));
    StepCoefficients c;
    c.beta = beta;
    c.gamma = 1.0 - beta;
    const double res = x_next.allFinite() ? (x_next - x).norm() : 0.0;
    z_prev = z;
    if (!commit(t, k, std::move(x_next), std::move(z), c, 0.0, res)) break;
  }
  fill_ell(t);
  return {std::move(t), std::nullopt};
}

RunResult run_halpern(const SchemeConfig& cfg, const Point& u) {
  Trajectory t = make_trajectory(cfg, cfg.x0, u, false);
  for (std::size_t k = 0; k < cfg.horizon; ++k) {
    const Point x = t.x.back();
    const double beta = cfg.schedules.beta(k);
    Point px;
    try {
      px = (*cfg.P)(x);
    } catch (const NonFiniteError&) {
      mark_diverged(t, k);
      break;
    }
    Point x_next = maybe_clamp(cfg, step_basic(beta, x, px));
    StepCoefficients c;
    c.beta = beta;
    c.gamma = 1.0 - beta;
    t.mapped.push_back(px);
    if (!commit(t, k, std::move(x_next), px, c, 0.0, (px - x).norm())) break;
  }
  t.mapped.resize(t.z.size());
  fill_ell(t);
  return {std::move(t), std::nullopt};
}

RunResult run_viscous(const SchemeConfig& cfg, const Point& u) {
  const bool coupled = cfg.kind == SchemeKind::coupled_aux;
  const bool viscosity = cfg.kind == SchemeKind::viscosity;
  Trajectory t = make_trajectory(cfg, cfg.x0, u, false);
  std::optional<Trajectory> a;
  if (coupled) a = make_trajectory(cfg, cfg.xbar0.value_or(cfg.x0), u, true);
  std::optional<OmegaHistory> hist;
  if (cfg.companion && !viscosity) hist.emplace(*cfg.companion);

  const ContractionMap& f = *cfg.f;
  const MapFamily& fam = *cfg.family;
  const double r = viscosity ? 0.0 : cfg.schedules.r;

  for (std::size_t k = 0; k < cfg.horizon; ++k) {
    StepCoefficients c = cfg.schedules.at(k);
    if (viscosity) {
      c.delta = 0.0;
      c.epsilon = 0.0;
      c.gamma = 1.0 - c.alpha - c.beta;
    }
    double phi = 0.0;
    if (hist) phi = phi_forcing(*cfg.companion, *hist, k, cfg.schedules.v, cfg.schedules.s(k));

    const Point x = t.x.back();
    Point fx, tx;
    try {
      fx = f(x);
      tx = fam(k, x);
    } catch (const NonFiniteError&) {
      mark_diverged(t, k);
      break;
    }
    const double forcing = phi + c.delta * r;
    Point x_next = maybe_clamp(cfg, compose_main(c, fx, x, tx, forcing, u));
    Point z = (c.alpha * fx + c.gamma * tx + forcing * u) / (1.0 - c.beta);

    // Auxiliary step uses the same x_k before the main trajectory advances.
    std::optional<Point> xb_next, zb, fxb, txb;
    Point xb;
    if (a) {
      xb = a->x.back();
      try {
        fxb = f(xb);
        txb = fam(k, xb);
      } catch (const NonFiniteError&) {
        mark_diverged(*a, k);
        mark_diverged(t, k);
        break;
      }
      const Point& lead = cfg.aux_variant == AuxVariant::main_iterate ? x : xb;
      xb_next = maybe_clamp(cfg, compose_aux(c.alpha, *fxb, c.beta, lead, c.gamma, *txb));
      zb = (c.alpha * *fxb + c.gamma * *txb) / (1.0 - c.beta);
    }

    const double res = (tx - x).norm();
    t.mapped.push_back(tx);
    t.fx.push_back(fx);
    const bool main_ok = commit(t, k, std::move(x_next), std::move(z), c, phi, res);
    bool aux_ok = true;
    if (a) {
      a->mapped.push_back(*txb);
      a->fx.push_back(*fxb);
      a->lead.push_back(cfg.aux_variant == AuxVariant::main_iterate ? x : xb);
      aux_ok = commit(*a, k, std::move(*xb_next), std::move(*zb), c, 0.0, (*txb - xb).norm());
    }
    if (hist) {
      try {
        *hist = step_omega(*cfg.companion, std::move(*hist));
      } catch (const NonFiniteError&) {
        mark_diverged(t, k);
        break;
      }
    }
    if (!main_ok || !aux_ok) {
      // Stop both so the pair stays synchronized.
      if (!t.meta.diverged) mark_diverged(t, k);
      if (a && !a->meta.diverged) mark_diverged(*a, k);
      break;
    }
  }
  std::size_t n = t.steps();
  if (a) n = std::min(n, a->steps());
  truncate(t, n);
  fill_ell(t);
  if (a) {
    truncate(*a, n);
    fill_ell(*a);
  }
  return {std::move(t), std::move(a)};
}

}  // namespace

RunResult run(const SchemeConfig& cfg) {
  cfg.validate();
  const Point u = cfg.direction ? Point(cfg.direction->normalized()) : default_direction(cfg.dim());
  switch (cfg.kind) {
    case SchemeKind::basic:
      return run_basic(cfg, u);
    case SchemeKind::halpern:
      return run_halpern(cfg, u);
    case SchemeKind::viscosity:
    case SchemeKind::generalized:
    case SchemeKind::coupled_aux:
      return run_viscous(cfg, u);
  }
  throw std::logic_error("unhandled scheme kind");
}

double closed_form_solution(const std::vector<double>& betas, const std::vector<double>& zs, double x0,
                            std::size_t k) {
  if (betas.size() < k || zs.size() < k) throw std::invalid_argument("closed_form_solution: lists shorter than k");
  double acc = 0.0;
  double prod = 1.0;  // prod_{l=j+1}^{k-1} beta_l
  for (std::size_t i = k; i-- > 0;) {
    acc += prod * (1.0 - betas[i]) * zs[i];
    prod *= betas[i];
  }
  return prod * x0 + acc;
}

Point closed_form_solution(const std::vector<double>& betas, const std::vector<Point>& zs, const Point& x0,
                           std::size_t k) {
  if (betas.size() < k || zs.size() < k) throw std::invalid_argument("closed_form_solution: lists shorter than k");
  Point acc = Point::Zero(x0.size());
  double prod = 1.0;
  for (std::size_t i = k; i-- > 0;) {
    acc += prod * (1.0 - betas[i]) * zs[i];
    prod *= betas[i];
  }
  return prod * x0 + acc;
}

}  // namespace hlab
