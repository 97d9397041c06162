#include "hlab/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "hlab/diagnostics.hpp"
#include "hlab/trajectory_csv.hpp"

namespace hlab::cli {

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.horizon) {
    if (*o.horizon < 1) throw UsageError("--horizon must be >= 1");
    cfg.scheme.horizon = *o.horizon;
  }
  if (o.seed) cfg.scheme.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
}

namespace {

bool viscous(SchemeKind k) { return k != SchemeKind::basic && k != SchemeKind::halpern; }

// Evenly spread indices over the last 20% of [0, h).
std::vector<std::size_t> tail_indices(std::size_t h, std::size_t count) {
  const std::size_t lo = h - std::max<std::size_t>(1, h / 5);
  std::vector<std::size_t> ks;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t k = lo + (h - 1 - lo) * i / std::max<std::size_t>(1, count - 1);
    if (ks.empty() || ks.back() != k) ks.push_back(k);
  }
  return ks;
}

DiagnosticReport basic_ranges(const ExperimentConfig& cfg, std::size_t h) {
  DiagnosticReport r("basic_ranges");
  const Schedule& beta = cfg.scheme.schedules.beta;
  if (beta.horizon()) h = std::min(h, *beta.horizon() + 1);
  double lo = 1.0, hi = 0.0;
  std::optional<std::size_t> first_bad;
  for (std::size_t k = 0; k < h; ++k) {
    const double b = beta(k);
    lo = std::min(lo, b);
    hi = std::max(hi, b);
    if (!(b >= 0.0 && b < 1.0) && !first_bad) first_bad = k;
  }
  r.measure("min_beta", lo).measure("max_beta", hi).measure("checked_steps", static_cast<double>(h));
  if (first_bad) r.measure("first_violation_k", static_cast<double>(*first_bad));
  const auto bad = beta.inconsistent_traits();
  for (Trait t : bad) r.note("declared trait " + to_string(t) + " contradicts the closed form");
  r.status = (!first_bad && bad.empty()) ? Status::pass : Status::fail;
  if (first_bad) r.note("beta_k must lie in [0,1)");
  return r;
}

void map_checks(const ExperimentConfig& cfg, std::size_t h, ReportSet& rs) {
  const SchemeConfig& sc = cfg.scheme;
  const ValidationSpec& v = cfg.validation;
  const AmbientSpace& C = *sc.space;
  const std::uint64_t seed = sc.seed;
  constexpr double slack = 1e-9;

  if (sc.kind == SchemeKind::halpern) {
    DiagnosticReport r("P_nonexpansive");
    const double est = estimate_lipschitz(*sc.P, C, v.samples, seed);
    r.measure("declared_lipschitz", sc.P->lipschitz()).measure("sampled_lipschitz", est);
    r.tolerance("bound", 1.0);
    r.status = (sc.P->lipschitz() <= 1.0 + slack && est <= 1.0 + slack) ? Status::pass : Status::fail;
    rs.add(std::move(r));
    return;
  }

  {
    DiagnosticReport r("contraction");
    const double est = estimate_lipschitz(sc.f->map(), C, v.samples, seed);
    r.measure("declared_bound", sc.f->lipschitz_bound()).measure("sampled_lipschitz", est);
    r.status = est <= sc.f->lipschitz_bound() + slack ? Status::pass : Status::fail;
    rs.add(std::move(r));
  }

  const MapFamily& fam = *sc.family;
  {
    DiagnosticReport r("family_lipschitz");
    const double est = estimate_lipschitz(fam.limit(), C, v.samples, seed);
    double tail = 0.0;
    for (std::size_t k : tail_indices(h, 10)) tail = std::max(tail, fam.lipschitz_bound(k));
    r.measure("declared_limit_lipschitz", fam.limit().lipschitz()).measure("sampled_limit_lipschitz", est);
    r.measure("tail_lipschitz_bound", tail);
    r.tolerance("limsup", 1.0 + v.tol);
    const bool ok = est <= fam.limit().lipschitz() + slack && tail <= 1.0 + v.tol;
    r.status = ok ? Status::pass : Status::fail;
    if (!ok) r.note("family is not asymptotically nonexpansive on the space");
    rs.add(std::move(r));
  }
  {
    DiagnosticReport r("family_drift");
    const double d = family_drift(fam, h - 1, C, v.samples, seed);
    r.measure("drift_at_horizon", d).tolerance("drift", v.tol);
    r.status = d <= v.tol ? Status::pass : Status::fail;
    rs.add(std::move(r));
  }
  {
    DiagnosticReport r("expansion_quotient");
    // Viscosity has no delta term; measure against alpha alone.
    const Schedule& slow = sc.kind == SchemeKind::viscosity ? sc.schedules.alpha : sc.schedules.delta;
    const auto q = expansion_quotient(fam, sc.schedules.alpha, slow, tail_indices(h, 10), C, v.samples, seed);
    r.tolerance("quotient", v.tol);
    r.measure("skipped", static_cast<double>(q.skipped.size()));
    if (std::isinf(q.max_quotient) && q.max_quotient < 0) {
      r.status = Status::inconclusive;
      r.note("min(alpha_k, delta_k) vanished at every sampled index");
    } else {
      r.measure("max_quotient", q.max_quotient).measure("worst_k", static_cast<double>(q.worst_k));
      r.status = q.max_quotient <= v.tol ? Status::pass : Status::fail;
    }
    rs.add(std::move(r));
  }
}

}  // namespace

ReportSet validate_experiment(const ExperimentConfig& cfg) {
  const SchemeConfig& sc = cfg.scheme;
  const std::size_t h = std::max<std::size_t>(2, cfg.validation.horizon.value_or(sc.horizon));
  ReportSet rs;
  switch (cfg.validation.profile) {
    case Profile::standard:
      rs.append(validate_assumptions(sc.schedules, h, cfg.validation.tol));
      break;
    case Profile::positive_venter:
      rs.append(validate_positive_venter(sc.schedules, h, cfg.validation.tol));
      break;
    case Profile::basic:
      rs.add(basic_ranges(cfg, h));
      break;
  }
  if (sc.kind != SchemeKind::basic) map_checks(cfg, h, rs);
  if (sc.companion && viscous(sc.kind)) {
    rs.add(validate_weak_contraction(*sc.companion, cfg.validation.samples, sc.seed, cfg.validation.tol));
  }
  return rs;
}

namespace {

using Check = std::function<DiagnosticReport()>;

struct CheckEntry {
  std::string name;
  bool by_default;
  Check fn;
};

DiagnosticReport guarded(const std::string& id, const Check& fn) {
  DiagnosticReport r;
  try {
    r = fn();
  } catch (const NotConverged& e) {
    r = DiagnosticReport();
    r.status = Status::fail;
    r.note(std::string("not converged: ") + e.what());
  } catch (const std::exception& e) {
    r = DiagnosticReport();
    r.status = Status::inconclusive;
    r.note(e.what());
  }
  r.id = id;
  return r;
}

DiagnosticReport fixed_point_report(const ExperimentConfig& cfg, const Trajectory& t, const LipschitzMap& limit) {
  const auto est = estimate_fixed_point(t, limit, cfg.diagnostics.fp_window, cfg.diagnostics.settle_tol);
  return check_fixed_point(est, cfg.diagnostics.tail_tol);
}

DiagnosticReport vi_report(const ExperimentConfig& cfg, const Trajectory& t) {
  const SchemeConfig& sc = cfg.scheme;
  const DiagnosticsSpec& d = cfg.diagnostics;
  const auto est = estimate_fixed_point(t, sc.family->limit(), d.fp_window, d.settle_tol);
  Point xs = est.x;
  if (d.vi_shift) xs += *d.vi_shift;
  DiagnosticReport r;
  if (d.vi_grid) {
    std::vector<Point> cands;
    const auto n = static_cast<std::size_t>(std::llround((d.vi_grid->hi - d.vi_grid->lo) / d.vi_grid->step));
    for (std::size_t i = 0; i <= n; ++i) cands.push_back(Point::Constant(1, d.vi_grid->lo + d.vi_grid->step * i));
    r = check_variational_inequality(xs, *sc.f, sc.family->limit(), cands, d.vi_tol);
  } else {
    r = check_variational_inequality(xs, *sc.f, *sc.family, *sc.space, d.vi_samples, sc.seed, d.vi_tol);
  }
  if (d.vi_shift) r.note("evaluated at a shifted estimate of x*");
  r.measure("xstar_estimate_residual", est.residual);
  return r;
}

DiagnosticReport missing(const std::string& what) {
  DiagnosticReport r;
  r.status = Status::inconclusive;
  r.note(what + " not configured");
  return r;
}

std::vector<CheckEntry> suite_checks(const ExperimentConfig& cfg, const RunResult& run, const std::string& suite) {
  // Lambdas outlive this frame: capture pointers by value only.
  const ExperimentConfig* c = &cfg;
  const SchemeConfig* sc = &cfg.scheme;
  const DiagnosticsSpec* d = &cfg.diagnostics;
  const Trajectory* t = &run.main;
  const Trajectory* a = run.aux ? &*run.aux : nullptr;
  const bool basic_like = sc->kind == SchemeKind::basic || sc->kind == SchemeKind::halpern;
  const bool halpern = sc->kind == SchemeKind::halpern;
  std::vector<CheckEntry> out;

  if (suite == "thm21") {
    if (!basic_like) throw UsageError("suite thm21 applies to basic and halpern schemes");
    out.push_back({"band_monotone", !halpern, [=] { return check_band_monotone(*t, d->tail_tol); }});
    out.push_back({"error_band", !halpern, [=] { return check_error_band(*t, d->tail_tol); }});
    out.push_back({"positive_band", !halpern, [=] { return check_positive_band(*t, d->tail_tol); }});
    out.push_back({"boundedness", d->boundedness.has_value(), [=] {
                     return d->boundedness ? check_boundedness(*t, *d->boundedness) : missing("boundedness case");
                   }});
    out.push_back({"venter", true, [=] { return check_venter(*t, sc->schedules.beta, d->venter); }});
    out.push_back({"suzuki", halpern, [=] { return check_suzuki(*t, d->limsup_tol); }});
    out.push_back({"positivity", d->positivity, [=] { return check_positivity(*t); }});
    out.push_back({"telescoping", halpern, [=] { return check_telescoping(*t, d->telescoping_tol); }});
    out.push_back({"fixed_point", halpern, [=] {
                     return halpern ? fixed_point_report(*c, *t, *sc->P) : missing("map P");
                   }});
  } else if (suite == "thm42") {
    if (basic_like) throw UsageError("suite thm42 applies to viscosity, generalized and coupled schemes");
    out.push_back({"residual_vanishes", true, [=] { return check_residual_vanishes(*t, *sc->family, d->tail_tol); }});
    out.push_back({"permanence", true, [=] { return check_permanence(*t, d->permanence_k0); }});
    out.push_back({"telescoping", true, [=] { return check_telescoping(*t, d->telescoping_tol); }});
    out.push_back({"fixed_point", true, [=] { return fixed_point_report(*c, *t, sc->family->limit()); }});
    out.push_back({"suzuki", true, [=] { return check_suzuki(*t, d->limsup_tol); }});
    out.push_back({"variational_inequality", d->vi, [=] { return vi_report(*c, *t); }});
    out.push_back({"positivity", d->positivity, [=] { return check_positivity(*t); }});
  } else if (suite == "thm411") {
    if (!a) throw UsageError("suite thm411 applies to the coupled scheme");
    out.push_back({"offset_series", true, [=] { return check_offset_series(*t, *a, d->identity_tol); }});
    out.push_back({"telescoping", true, [=] { return check_telescoping(*t, d->telescoping_tol); }});
    out.push_back({"aux_telescoping", true, [=] { return check_telescoping(*a, d->telescoping_tol); }});
    out.push_back({"aux_permanence", true, [=] { return check_permanence(*a, d->permanence_k0); }});
  } else if (suite == "corollary413") {
    if (cfg.validation.profile != Profile::positive_venter) {
      throw UsageError("suite corollary413 applies to configs with validation profile positive_venter");
    }
    out.push_back({"venter", true, [=] { return check_venter(*t, sc->schedules.beta, d->venter); }});
    out.push_back({"positivity", true, [=] { return check_positivity(*t); }});
    if (a) {
      out.push_back({"aux_venter", true, [=] { return check_venter(*a, sc->schedules.beta, d->venter); }});
      out.push_back({"aux_positivity", true, [=] { return check_positivity(*a); }});
    }
  } else {
    throw UsageError("unknown suite '" + suite + "'");
  }
  return out;
}

// Suites that `all` runs for this config.
std::vector<std::string> applicable_suites(const ExperimentConfig& cfg) {
  const SchemeKind k = cfg.scheme.kind;
  if (k == SchemeKind::basic || k == SchemeKind::halpern) return {"thm21"};
  std::vector<std::string> s;
  s.push_back(cfg.validation.profile == Profile::positive_venter ? "corollary413" : "thm42");
  if (k == SchemeKind::coupled_aux) s.push_back("thm411");
  return s;
}

}  // namespace

ReportSet run_suite(const ExperimentConfig& cfg, const RunResult& run, const std::string& suite) {
  if (suite == "all") {
    ReportSet rs;
    for (const auto& s : applicable_suites(cfg)) rs.append(run_suite(cfg, run, s));
    return rs;
  }
  const auto checks = suite_checks(cfg, run, suite);
  const auto& wanted = cfg.diagnostics.checks;
  std::vector<std::string> selected;
  for (const auto& w : wanted) {
    const auto slash = w.find('/');
    if (slash == std::string::npos) throw UsageError("check '" + w + "' must be written suite/name");
    const auto s = w.substr(0, slash);
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end() || s == "all") {
      throw UsageError("unknown suite in check '" + w + "'");
    }
    if (s != suite) continue;
    const auto name = w.substr(slash + 1);
    const bool known = std::any_of(checks.begin(), checks.end(), [&](const CheckEntry& c) { return c.name == name; });
    if (!known) throw UsageError("unknown check '" + w + "'");
    selected.push_back(name);
  }
  ReportSet rs;
  for (const auto& c : checks) {
    const bool on = selected.empty() ? c.by_default
                                     : std::find(selected.begin(), selected.end(), c.name) != selected.end();
    if (on) rs.add(guarded(suite + "/" + c.name, c.fn));
  }
  return rs;
}

namespace {

// Loads, overrides and (unless forced) validates. Returns an exit code when
// the command must stop early.
std::optional<int> prepare(const std::filesystem::path& path, const Overrides& o, std::ostream& out,
                           std::ostream& err, ExperimentConfig& cfg) {
  try {
    cfg = load_config(path);
    apply_overrides(cfg, o);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  if (o.force) return std::nullopt;
  const ReportSet rs = validate_experiment(cfg);
  if (!rs.conforming()) {
    for (const auto& r : rs.entries) {
      if (r.status == Status::fail || r.status == Status::inconclusive) out << "validate/" << to_line(r) << "\n";
    }
    err << "error: " << path.string() << " does not satisfy the scheme assumptions (use --force for negative controls)\n";
    return kExitNonConforming;
  }
  return std::nullopt;
}

DiagnosticReport run_summary(const Trajectory& t, const std::string& id) {
  DiagnosticReport r(id);
  r.status = Status::measured;
  r.horizon = t.meta.horizon;
  double mx = 0.0;
  for (const auto& x : t.x) mx = std::max(mx, x.norm());
  r.measure("steps", static_cast<double>(t.steps()));
  r.measure("diverged", t.meta.diverged ? 1.0 : 0.0);
  if (t.meta.divergence_step) r.measure("divergence_step", static_cast<double>(*t.meta.divergence_step));
  r.measure("max_norm", mx);
  r.measure("final_norm", t.x.back().norm());
  for (int i = 0; i < t.dim(); ++i) r.measure("x_final_" + std::to_string(i + 1), t.x.back()[i]);
  if (!t.residual.empty()) r.measure("final_residual", t.residual.back());
  return r;
}

std::string offset_csv(const std::vector<double>& d) {
  std::string s = "k,D\n";
  char buf[64];
  for (std::size_t k = 0; k < d.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", k, d[k]);
    s += buf;
  }
  return s;
}

}  // namespace

int cmd_validate(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config);
    apply_overrides(cfg, o);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  const ReportSet rs = validate_experiment(cfg);
  for (const auto& r : rs.entries) out << to_line(r) << "\n";
  const bool ok = rs.conforming();
  out << (ok ? "conforming" : "non-conforming") << "\n";
  return ok ? kExitOk : kExitNonConforming;
}

int cmd_run(const std::filesystem::path& config, const Overrides& o, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  if (auto code = prepare(config, o, out, err, cfg)) return *code;
  RunResult res;
  try {
    res = run(cfg.scheme);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ostringstream summary;
  summary << to_line(run_summary(res.main, "run/main")) << "\n";
  if (res.aux) summary << to_line(run_summary(*res.aux, "run/aux")) << "\n";
  std::vector<double> curve;
  if (res.aux) {
    const DiagnosticReport off = check_offset_series(res.main, *res.aux, cfg.diagnostics.identity_tol, &curve);
    summary << to_line(off) << "\n";
  }

  const auto dir = cfg.out_dir;
  try {
    std::filesystem::create_directories(dir);
    write_trajectory_csv_file(res.main, dir / (cfg.name + ".csv"));
    if (res.aux) {
      write_trajectory_csv_file(*res.aux, dir / (cfg.name + "_aux.csv"));
      write_text_atomic(dir / (cfg.name + "_offset.csv"), offset_csv(curve));
    }
    write_text_atomic(dir / (cfg.name + "_summary.txt"), summary.str());
  } catch (const std::exception& e) {
    err << "error: cannot write output to " << dir.string() << ": " << e.what() << "\n";
    return kExitUsage;
  }
  out << summary.str();
  if (res.diverged()) {
    err << "divergence: iterate left the guard region at step "
        << res.main.meta.divergence_step.value_or(res.aux ? res.aux->meta.divergence_step.value_or(0) : 0) << "\n";
    return kExitDivergence;
  }
  return kExitOk;
}

int cmd_check(const std::filesystem::path& config, const std::string& suite, const Overrides& o, std::ostream& out,
              std::ostream& err) {
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    err << "error: unknown suite '" << suite << "'\n";
    return kExitUsage;
  }
  ExperimentConfig cfg;
  if (auto code = prepare(config, o, out, err, cfg)) return *code;
  RunResult res;
  ReportSet rs;
  try {
    res = run(cfg.scheme);
    rs = run_suite(cfg, res, suite);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::ostringstream lines;
  for (const auto& r : rs.entries) lines << to_line(r) << "\n";
  out << lines.str();
  if (o.out) {
    try {
      std::filesystem::create_directories(cfg.out_dir);
      write_text_atomic(cfg.out_dir / (cfg.name + "_check.txt"), lines.str());
    } catch (const std::exception& e) {
      err << "error: cannot write output to " << cfg.out_dir.string() << ": " << e.what() << "\n";
      return kExitUsage;
    }
  }
  if (rs.any_failure()) return kExitDiagnostic;
  if (res.diverged()) return kExitDivergence;
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"hlab: run and check averaged fixed-point schemes"};
  app.require_subcommand(1, 1);

  std::string path, suite = "all";
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  std::string outdir;
  bool force = false;

  auto common = [&](CLI::App* sub) {
    sub->add_option("config", path, "experiment config (YAML)")->required();
    sub->add_option("--horizon", horizon, "override the run horizon");
    sub->add_option("--seed", seed, "override the seed");
  };
  auto* v = app.add_subcommand("validate", "check a config against the scheme assumptions");
  common(v);
  auto* r = app.add_subcommand("run", "run a config and export trajectories");
  common(r);
  r->add_option("--out", outdir, "output directory");
  r->add_flag("--force", force, "run even if the config is non-conforming");
  auto* c = app.add_subcommand("check", "run a config and its diagnostic suite");
  common(c);
  c->add_option("--suite", suite, "thm21 | thm42 | thm411 | corollary413 | all");
  c->add_option("--out", outdir, "also write the check lines here");
  c->add_flag("--force", force, "check even if the config is non-conforming");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Overrides o;
  auto* sub = app.get_subcommands().front();
  if (sub->count("--horizon")) o.horizon = horizon;
  if (sub->count("--seed")) o.seed = seed;
  if (sub->get_option_no_throw("--out") && sub->count("--out")) o.out = outdir;
  o.force = force;

  try {
    if (sub == v) return cmd_validate(path, o, out, err);
    if (sub == r) return cmd_run(path, o, out, err);
    return cmd_check(path, suite, o, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace hlab::cli
