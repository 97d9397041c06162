#include "hlab/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace hlab {

namespace {

constexpr std::pair<Trait, std::string_view> kTraitNames[] = {
    {Trait::tends_to_zero, "tends_to_zero"},
    {Trait::sum_diverges, "sum_diverges"},
    {Trait::sum_converges, "sum_converges"},
    {Trait::liminf_positive, "liminf_positive"},
    {Trait::limsup_below_one, "limsup_below_one"},
};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("schedule parameter '") + what + "' must be finite");
}

Certainty from_bool(bool b) { return b ? Certainty::holds : Certainty::fails; }

// Traits of a sequence converging to a finite limit L, or of the zero sequence.
Certainty limit_trait(Trait t, double limit, bool summable) {
  switch (t) {
    case Trait::tends_to_zero: return from_bool(limit == 0.0);
    case Trait::sum_converges: return from_bool(summable);
    case Trait::sum_diverges: return from_bool(!summable);
    case Trait::liminf_positive: return from_bool(limit > 0.0);
    case Trait::limsup_below_one: return from_bool(limit < 1.0);
  }
  return Certainty::unknown;
}

Certainty power_law_trait(Trait t, double c, double a) {
  if (c <= 0.0) return limit_trait(t, 0.0, true);  // clipped to the zero sequence
  if (a > 0.0) return limit_trait(t, 0.0, a > 1.0);
  if (a == 0.0) return limit_trait(t, std::min(c, 1.0), false);
  return limit_trait(t, 1.0, false);  // grows, clipped at 1
}

Certainty geometric_trait(Trait t, double c, double q) {
  if (c == 0.0 || std::abs(q) < 1.0) return limit_trait(t, 0.0, true);
  if (q == 1.0) return limit_trait(t, c, false);
  // Non-convergent: |q| >= 1 and q != 1.
  switch (t) {
    case Trait::tends_to_zero: return Certainty::fails;
    case Trait::sum_converges: return Certainty::fails;
    case Trait::sum_diverges: return Certainty::holds;
    case Trait::liminf_positive: return from_bool(q > 1.0 && c > 0.0);
    case Trait::limsup_below_one:
      if (q > 1.0) return from_bool(c < 0.0);
      if (q == -1.0) return from_bool(std::abs(c) < 1.0);
      return Certainty::fails;
  }
  return Certainty::unknown;
}

}  // namespace

std::string to_string(Trait t) {
  for (const auto& [trait, name] : kTraitNames) {
    if (trait == t) return std::string(name);
  }
  return "unknown";
}

std::optional<Trait> parse_trait(std::string_view name) {
  for (const auto& [trait, n] : kTraitNames) {
    if (n == name) return trait;
  }
  return std::nullopt;
}

Schedule::Schedule() = default;

Schedule Schedule::constant(double c, TraitSet traits) {
  require_finite(c, "c");
  Schedule s;
  s.kind_ = ScheduleKind::constant;
  s.c_ = c;
  s.traits_ = std::move(traits);
  return s;
}

Schedule Schedule::power_law(double c, double a, TraitSet traits, double shift) {
  require_finite(c, "c");
  require_finite(a, "a");
  require_finite(shift, "shift");
  if (shift <= 0.0) throw std::invalid_argument("power-law shift must be positive");
  Schedule s;
  s.kind_ = ScheduleKind::power_law;
  s.c_ = c;
  s.a_ = a;
  s.shift_ = shift;
  s.traits_ = std::move(traits);
  return s;
}

Schedule Schedule::geometric(double c, double q, TraitSet traits) {
  require_finite(c, "c");
  require_finite(q, "q");
  Schedule s;
  s.kind_ = ScheduleKind::geometric;
  s.c_ = c;
  s.q_ = q;
  s.traits_ = std::move(traits);
  return s;
}

Schedule Schedule::table(std::vector<double> values, TraitSet traits) {
  if (values.empty()) throw std::invalid_argument("table schedule needs at least one value");
  for (double v : values) require_finite(v, "table value");
  Schedule s;
  s.kind_ = ScheduleKind::table;
  s.table_ = std::make_shared<const std::vector<double>>(std::move(values));
  s.traits_ = std::move(traits);
  return s;
}

Schedule Schedule::complement(Schedule inner, TraitSet traits) {
  Schedule s;
  s.kind_ = ScheduleKind::complement;
  s.inner_ = std::make_shared<const Schedule>(std::move(inner));
  s.traits_ = std::move(traits);
  return s;
}

double Schedule::operator()(std::size_t k) const {
  switch (kind_) {
    case ScheduleKind::constant:
      return c_;
    case ScheduleKind::power_law: {
      const double v = c_ * std::pow(static_cast<double>(k) + shift_, -a_);
      return std::clamp(v, 0.0, 1.0);
    }
    case ScheduleKind::geometric:
      return c_ * std::pow(q_, static_cast<double>(k));
    case ScheduleKind::table:
      if (k >= table_->size()) {
        throw std::out_of_range("table schedule queried at k=" + std::to_string(k) + " beyond horizon " +
                                std::to_string(table_->size() - 1));
      }
      return (*table_)[k];
    case ScheduleKind::complement:
      return 1.0 - (*inner_)(k);
  }
  return 0.0;
}

std::optional<std::size_t> Schedule::horizon() const {
  if (kind_ == ScheduleKind::table) return table_->size() - 1;
  if (kind_ == ScheduleKind::complement) return inner_->horizon();
  return std::nullopt;
}

bool Schedule::horizon_limited() const { return horizon().has_value(); }

std::optional<double> Schedule::limit() const {
  switch (kind_) {
    case ScheduleKind::constant:
      return c_;
    case ScheduleKind::power_law:
      if (c_ <= 0.0 || a_ > 0.0) return 0.0;
      if (a_ == 0.0) return std::min(c_, 1.0);
      return 1.0;
    case ScheduleKind::geometric:
      if (c_ == 0.0 || std::abs(q_) < 1.0) return 0.0;
      if (q_ == 1.0) return c_;
      return std::nullopt;
    case ScheduleKind::table:
      return std::nullopt;
    case ScheduleKind::complement:
      if (auto l = inner_->limit()) return 1.0 - *l;
      return std::nullopt;
  }
  return std::nullopt;
}

Certainty Schedule::closed_form(Trait t) const {
  switch (kind_) {
    case ScheduleKind::constant:
      return limit_trait(t, c_, c_ == 0.0);
    case ScheduleKind::power_law:
      return power_law_trait(t, c_, a_);
    case ScheduleKind::geometric:
      return geometric_trait(t, c_, q_);
    case ScheduleKind::table:
      return Certainty::unknown;
    case ScheduleKind::complement: {
      const auto l = inner_->limit();
      if (!l) return Certainty::unknown;
      const double lim = 1.0 - *l;
      switch (t) {
        case Trait::tends_to_zero: return from_bool(lim == 0.0);
        case Trait::liminf_positive: return from_bool(lim > 0.0);
        case Trait::limsup_below_one: return from_bool(lim < 1.0);
        case Trait::sum_diverges:
        case Trait::sum_converges:
          if (lim != 0.0) return from_bool(t == Trait::sum_diverges);
          // 1 - inner -> 0: summability depends on the rate of approach.
          if (inner_->kind() == ScheduleKind::constant) return from_bool(t == Trait::sum_converges);
          return Certainty::unknown;
      }
      return Certainty::unknown;
    }
  }
  return Certainty::unknown;
}

std::vector<Trait> Schedule::inconsistent_traits() const {
  std::vector<Trait> out;
  for (Trait t : traits_) {
    if (closed_form(t) == Certainty::fails) out.push_back(t);
  }
  if (traits_.count(Trait::sum_converges) && traits_.count(Trait::sum_diverges) &&
      std::find(out.begin(), out.end(), Trait::sum_diverges) == out.end()) {
    out.push_back(Trait::sum_diverges);
  }
  return out;
}

std::string Schedule::describe() const {
  char buf[160];
  switch (kind_) {
    case ScheduleKind::constant:
      std::snprintf(buf, sizeof(buf), "constant(c=%g)", c_);
      break;
    case ScheduleKind::power_law:
      std::snprintf(buf, sizeof(buf), "power_law(c=%g, a=%g, shift=%g)", c_, a_, shift_);
      break;
    case ScheduleKind::geometric:
      std::snprintf(buf, sizeof(buf), "geometric(c=%g, q=%g)", c_, q_);
      break;
    case ScheduleKind::table:
      std::snprintf(buf, sizeof(buf), "table(n=%zu)", table_->size());
      break;
    case ScheduleKind::complement:
      return "complement(" + inner_->describe() + ")";
  }
  return buf;
}

double eval_schedule(const Schedule& s, std::size_t k) { return s(k); }

Certainty certify_venter_beta(const Schedule& beta) {
  if (beta.kind() == ScheduleKind::complement) {
    const Schedule& gap = *beta.inner();
    const Certainty to_zero = gap.closed_form(Trait::tends_to_zero);
    const Certainty diverges = gap.closed_form(Trait::sum_diverges);
    if (to_zero == Certainty::fails || diverges == Certainty::fails) return Certainty::fails;
    if (to_zero == Certainty::unknown || diverges == Certainty::unknown) return Certainty::unknown;
    return Certainty::holds;
  }
  if (beta.kind() == ScheduleKind::table) return Certainty::unknown;
  // Closed-form kinds reach a limit of 1 only in finitely many steps or not at all.
  return Certainty::fails;
}

CountSchedule CountSchedule::constant(std::size_t n) {
  CountSchedule s;
  s.constant_ = n;
  return s;
}

CountSchedule CountSchedule::table(std::vector<std::size_t> values) {
  if (values.empty()) throw std::invalid_argument("count table needs at least one value");
  CountSchedule s;
  s.table_ = std::make_shared<const std::vector<std::size_t>>(std::move(values));
  return s;
}

std::size_t CountSchedule::operator()(std::size_t k) const {
  if (!table_) return constant_;
  if (k >= table_->size()) throw std::out_of_range("count table queried beyond its horizon");
  return (*table_)[k];
}

std::size_t CountSchedule::max_value() const {
  if (!table_) return constant_;
  return *std::max_element(table_->begin(), table_->end());
}

double derive_gamma(const ScheduleSet& set, std::size_t k) {
  const double a = set.alpha(k);
  const double b = set.beta(k);
  const double d = set.delta(k);
  const double e = set.epsilon(k);
  return 1.0 + (1.0 - b) * e - a - b - d;
}

StepCoefficients ScheduleSet::at(std::size_t k) const {
  StepCoefficients c;
  c.alpha = alpha(k);
  c.beta = beta(k);
  c.delta = delta(k);
  c.epsilon = epsilon(k);
  c.gamma = 1.0 + (1.0 - c.beta) * c.epsilon - c.alpha - c.beta - c.delta;
  return c;
}

namespace {

Status worse(Status a, Status b) {
  auto rank = [](Status s) {
    switch (s) {
      case Status::fail: return 3;
      case Status::inconclusive: return 2;
      default: return 0;
    }
  };
  return rank(b) > rank(a) ? b : a;
}

// Certify one required asymptotic property, recording the outcome on `r`.
Status certify(DiagnosticReport& r, const std::string& label, const Schedule& s, Trait t) {
  const Certainty c = s.closed_form(t);
  const std::string what = label + "." + to_string(t);
  if (c == Certainty::holds) {
    r.measure(what, 1.0);
    return Status::pass;
  }
  if (c == Certainty::fails) {
    r.measure(what, 0.0);
    r.note(what + " contradicted by " + s.describe());
    return Status::fail;
  }
  if (s.declares(t)) {
    r.measure(what, 1.0);
    r.note(what + " declared, horizon-limited");
    return Status::pass;
  }
  r.note(what + " not certifiable for " + s.describe());
  return Status::inconclusive;
}

std::size_t effective_horizon(const ScheduleSet& set, std::size_t horizon, bool& truncated) {
  std::size_t h = horizon;
  auto clip = [&](const Schedule& s) {
    if (auto sh = s.horizon()) h = std::min(h, *sh);
  };
  clip(set.alpha);
  clip(set.beta);
  clip(set.delta);
  clip(set.epsilon);
  for (const auto& v : set.v) clip(v);
  truncated = h < horizon;
  return h;
}

std::size_t tail_start(std::size_t h) {
  const std::size_t w = std::max<std::size_t>(1, h / 5);
  return h >= w ? h - w : 0;
}

DiagnosticReport check_weights(const ScheduleSet& set, std::size_t h) {
  DiagnosticReport r("weights_nonnegative");
  double min_v = std::numeric_limits<double>::infinity();
  for (const auto& v : set.v) {
    for (std::size_t k = 0; k <= h; ++k) min_v = std::min(min_v, v(k));
  }
  if (set.v.empty()) min_v = 0.0;
  r.measure("min_v", min_v);
  r.status = min_v >= 0.0 ? Status::pass : Status::fail;
  return r;
}

}  // namespace

ReportSet validate_assumptions(const ScheduleSet& set, std::size_t horizon, double tol) {
  if (horizon < 2) throw std::invalid_argument("validate_assumptions needs horizon >= 2");
  bool truncated = false;
  const std::size_t h = effective_horizon(set, horizon, truncated);
  const std::size_t t0 = tail_start(h);
  ReportSet out;

  // Pointwise ranges.
  {
    DiagnosticReport r("ranges");
    r.horizon = h;
    r.tolerance("gamma_slack", tol);
    std::size_t violations = 0;
    double min_beta = 1.0, max_beta = 0.0, min_gamma = 1.0, max_gamma = 0.0;
    double min_ad = 1.0, max_ad = 0.0;
    for (std::size_t k = 0; k <= h; ++k) {
      const StepCoefficients c = set.at(k);
      min_beta = std::min(min_beta, c.beta);
      max_beta = std::max(max_beta, c.beta);
      min_gamma = std::min(min_gamma, c.gamma);
      max_gamma = std::max(max_gamma, c.gamma);
      min_ad = std::min({min_ad, c.alpha, c.delta});
      max_ad = std::max({max_ad, c.alpha, c.delta});
      const bool ok = c.beta > 0.0 && c.beta < 1.0 && c.alpha >= 0.0 && c.alpha <= 1.0 && c.delta >= 0.0 &&
                      c.delta <= 1.0 && c.gamma >= -tol && c.gamma <= 1.0 + tol;
      if (!ok && violations++ == 0) r.measure("first_violation_k", static_cast<double>(k));
    }
    r.measure("violations", static_cast<double>(violations));
    r.measure("min_beta", min_beta).measure("max_beta", max_beta);
    r.measure("min_gamma", min_gamma).measure("max_gamma", max_gamma);
    r.measure("min_alpha_delta", min_ad).measure("max_alpha_delta", max_ad);
    if (truncated) r.note("horizon-limited by a table schedule");
    r.status = violations == 0 ? Status::pass : Status::fail;
    out.add(std::move(r));
  }
  out.add(check_weights(set, h));

  // alpha, delta -> 0 and liminf gamma > 0.
  {
    DiagnosticReport r("limits");
    r.horizon = h;
    Status st = Status::pass;
    st = worse(st, certify(r, "alpha", set.alpha, Trait::tends_to_zero));
    st = worse(st, certify(r, "delta", set.delta, Trait::tends_to_zero));
    double tail_min_gamma = std::numeric_limits<double>::infinity();
    for (std::size_t k = t0; k <= h; ++k) tail_min_gamma = std::min(tail_min_gamma, derive_gamma(set, k));
    r.measure("alpha_at_horizon", set.alpha(h)).measure("delta_at_horizon", set.delta(h));
    r.measure("tail_min_gamma", tail_min_gamma);
    if (!(tail_min_gamma > 0.0)) st = worse(st, Status::fail);
    const auto la = set.alpha.limit(), lb = set.beta.limit(), ld = set.delta.limit(), le = set.epsilon.limit();
    if (la && lb && ld && le) {
      const double lim_gamma = 1.0 + (1.0 - *lb) * *le - *la - *lb - *ld;
      r.measure("gamma_limit", lim_gamma);
      if (!(lim_gamma > 0.0)) st = worse(st, Status::fail);
    }
    r.status = st;
    out.add(std::move(r));
  }

  // sum alpha = inf, sum delta < inf.
  {
    DiagnosticReport r("series");
    r.horizon = h;
    Status st = Status::pass;
    st = worse(st, certify(r, "alpha", set.alpha, Trait::sum_diverges));
    st = worse(st, certify(r, "delta", set.delta, Trait::sum_converges));
    double sa = 0.0, sd = 0.0;
    for (std::size_t k = 0; k <= h; ++k) {
      sa += set.alpha(k);
      sd += set.delta(k);
    }
    r.measure("alpha_partial_sum", sa).measure("delta_partial_sum", sd);
    r.status = st;
    out.add(std::move(r));
  }

  // 0 < liminf beta <= limsup beta < 1.
  {
    DiagnosticReport r("beta_bounds");
    r.horizon = h;
    Status st = Status::pass;
    st = worse(st, certify(r, "beta", set.beta, Trait::liminf_positive));
    st = worse(st, certify(r, "beta", set.beta, Trait::limsup_below_one));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = t0; k <= h; ++k) {
      lo = std::min(lo, set.beta(k));
      hi = std::max(hi, set.beta(k));
    }
    r.measure("tail_min_beta", lo).measure("tail_max_beta", hi);
    if (!(lo > 0.0 && hi < 1.0)) st = worse(st, Status::fail);
    r.status = st;
    out.add(std::move(r));
  }

  // epsilon_k >= 1/(beta_k - 1) and epsilon -> 0.
  {
    DiagnosticReport r("epsilon");
    r.horizon = h;
    r.tolerance("tail", tol);
    Status st = certify(r, "epsilon", set.epsilon, Trait::tends_to_zero);
    std::size_t below = 0;
    double worst_gap = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= h; ++k) {
      const double b = set.beta(k);
      if (b == 1.0) continue;
      const double gap = set.epsilon(k) - 1.0 / (b - 1.0);
      worst_gap = std::min(worst_gap, gap);
      if (gap < 0.0) ++below;
    }
    const double tail = std::abs(set.epsilon(h));
    r.measure("lower_bound_violations", static_cast<double>(below));
    r.measure("min_margin", worst_gap);
    r.measure("tail_abs_epsilon", tail);
    if (below > 0 || tail > tol) st = worse(st, Status::fail);
    r.status = st;
    out.add(std::move(r));
  }

  // Declared traits must agree with the closed forms.
  {
    DiagnosticReport r("declared_traits");
    std::size_t bad = 0;
    auto audit = [&](const std::string& label, const Schedule& s) {
      for (Trait t : s.inconsistent_traits()) {
        ++bad;
        r.note(label + " declares " + to_string(t) + " but is " + s.describe());
      }
      if (s.horizon_limited() && !s.declared_traits().empty()) r.note(label + " traits horizon-limited");
    };
    audit("alpha", set.alpha);
    audit("beta", set.beta);
    audit("delta", set.delta);
    audit("epsilon", set.epsilon);
    for (std::size_t i = 0; i < set.v.size(); ++i) audit("v" + std::to_string(i + 1), set.v[i]);
    r.measure("inconsistent", static_cast<double>(bad));
    r.status = bad == 0 ? Status::pass : Status::fail;
    out.add(std::move(r));
  }
  return out;
}

ReportSet validate_positive_venter(const ScheduleSet& set, std::size_t horizon, double tol) {
  if (horizon < 2) throw std::invalid_argument("validate_positive_venter needs horizon >= 2");
  bool truncated = false;
  const std::size_t h = effective_horizon(set, horizon, truncated);
  ReportSet out;
  {
    DiagnosticReport r("positive_ranges");
    r.horizon = h;
    std::size_t violations = 0;
    for (std::size_t k = 0; k <= h; ++k) {
      const StepCoefficients c = set.at(k);
      const bool ok = c.beta >= 0.0 && c.beta < 1.0 && c.alpha >= 0.0 && c.alpha < 1.0 && c.delta >= 0.0 &&
                      c.delta < 1.0 && c.gamma >= -tol && c.gamma < 1.0;
      if (!ok && violations++ == 0) r.measure("first_violation_k", static_cast<double>(k));
    }
    r.measure("violations", static_cast<double>(violations));
    r.measure("r", set.r);
    r.status = (violations == 0 && set.r >= 0.0) ? Status::pass : Status::fail;
    out.add(std::move(r));
  }
  out.add(check_weights(set, h));
  {
    DiagnosticReport r("venter_beta");
    const Certainty c = certify_venter_beta(set.beta);
    r.measure("certified", c == Certainty::holds ? 1.0 : 0.0);
    r.status = c == Certainty::holds ? Status::pass : (c == Certainty::fails ? Status::fail : Status::inconclusive);
    if (c != Certainty::holds) r.note("beta must be 1 - g with g -> 0 and sum g = inf, got " + set.beta.describe());
    out.add(std::move(r));
  }
  {
    DiagnosticReport r("forcing_summable");
    Status st = Status::pass;
    if (set.r != 0.0) st = certify(r, "delta", set.delta, Trait::sum_converges);
    r.status = st;
    out.add(std::move(r));
  }
  return out;
}

}  // namespace hlab
