#include "hlab/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

namespace hlab::cli {

namespace {

class Parser {
 public:
  explicit Parser(std::string src) : src_(std::move(src)) {}

  [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
    const auto m = at.Mark();
    const int line = m.line < 0 ? 0 : m.line + 1;
    throw ConfigError(src_ + ":" + std::to_string(line) + ": " + msg);
  }

  void keys(const YAML::Node& n, std::initializer_list<const char*> allowed, const std::string& where) const {
    if (!n.IsMap()) fail(n, where + " must be a mapping");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : n) {
      const auto key = kv.first.as<std::string>();
      if (!ok.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
  }

  YAML::Node need(const YAML::Node& n, const char* key, const std::string& where) const {
    YAML::Node v = n[key];
    if (!v) fail(n, "missing '" + std::string(key) + "' in " + where);
    return v;
  }

  double num(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n, what + " must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(n, what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  double num_or(const YAML::Node& parent, const char* key, double dflt) const {
    const YAML::Node v = parent[key];
    return v ? num(v, key) : dflt;
  }

  std::size_t count(const YAML::Node& n, const std::string& what) const {
    const double v = num(n, what);
    if (v < 0 || v != std::floor(v)) fail(n, what + " must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  }

  std::string str(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n, what + " must be a string");
    return n.Scalar();
  }

  bool boolean(const YAML::Node& n, const std::string& what) const {
    try {
      return n.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(n, what + " must be true or false");
    }
  }

  Point point(const YAML::Node& n, const std::string& what) const {
    if (n.IsScalar()) {
      Point p(1);
      p[0] = num(n, what);
      return p;
    }
    if (!n.IsSequence() || n.size() == 0) fail(n, what + " must be a number or a nonempty list");
    Point p(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) p[static_cast<Eigen::Index>(i)] = num(n[i], what);
    return p;
  }

  Point point_dim(const YAML::Node& n, int m, const std::string& what) const {
    Point p = point(n, what);
    if (p.size() == 1 && m > 1 && n.IsScalar()) return Point::Constant(m, p[0]);
    if (p.size() != m) fail(n, what + " has dimension " + std::to_string(p.size()) + ", expected " + std::to_string(m));
    return p;
  }

  Matrix matrix(const YAML::Node& n, int m, const std::string& what) const {
    if (n.IsScalar()) return num(n, what) * Matrix::Identity(m, m);
    if (!n.IsSequence() || static_cast<int>(n.size()) != m) fail(n, what + " must have " + std::to_string(m) + " rows");
    Matrix A(m, m);
    for (int i = 0; i < m; ++i) {
      const YAML::Node row = n[static_cast<std::size_t>(i)];
      if (row.IsScalar() && m == 1) {
        A(0, 0) = num(row, what);
        continue;
      }
      if (!row.IsSequence() || static_cast<int>(row.size()) != m) {
        fail(row, what + " row must have " + std::to_string(m) + " entries");
      }
      for (int j = 0; j < m; ++j) A(i, j) = num(row[static_cast<std::size_t>(j)], what);
    }
    return A;
  }

  TraitSet traits(const YAML::Node& n) const {
    TraitSet out;
    if (!n) return out;
    if (!n.IsSequence()) fail(n, "traits must be a list");
    for (const auto& t : n) {
      const auto name = str(t, "trait");
      const auto tr = parse_trait(name);
      if (!tr) fail(t, "unknown trait '" + name + "'");
      out.insert(*tr);
    }
    return out;
  }

  Schedule schedule(const YAML::Node& n, const std::string& what) const {
    if (!n || n.IsNull()) fail(n, what + ": empty schedule");
    if (n.IsScalar()) return Schedule::constant(num(n, what));
    keys(n, {"kind", "c", "a", "q", "shift", "values", "inner", "traits"}, what);
    const auto kind = str(need(n, "kind", what), what + ".kind");
    const TraitSet tr = traits(n["traits"]);
    try {
      if (kind == "constant") return Schedule::constant(num(need(n, "c", what), what + ".c"), tr);
      if (kind == "power_law") {
        return Schedule::power_law(num(need(n, "c", what), what + ".c"), num(need(n, "a", what), what + ".a"), tr,
                                   num_or(n, "shift", 1.0));
      }
      if (kind == "geometric") {
        return Schedule::geometric(num(need(n, "c", what), what + ".c"), num(need(n, "q", what), what + ".q"), tr);
      }
      if (kind == "table") {
        const YAML::Node v = need(n, "values", what);
        const Point p = point(v, what + ".values");
        return Schedule::table(std::vector<double>(p.data(), p.data() + p.size()), tr);
      }
      if (kind == "complement") return Schedule::complement(schedule(need(n, "inner", what), what + ".inner"), tr);
    } catch (const std::invalid_argument& e) {
      fail(n, what + ": " + e.what());
    }
    fail(n["kind"], what + ": unknown schedule kind '" + kind + "'");
  }

  LipschitzMap map(const YAML::Node& n, int m, const std::string& what) const {
    keys(n, {"kind", "A", "b", "fixed_point", "c", "lo", "hi", "bound"}, what);
    const auto kind = str(need(n, "kind", what), what + ".kind");
    try {
      if (kind == "affine") {
        const Matrix A = matrix(need(n, "A", what), m, what + ".A");
        Point b = Point::Zero(m);
        if (n["b"] && n["fixed_point"]) fail(n, what + ": give either b or fixed_point, not both");
        if (n["b"]) b = point_dim(n["b"], m, what + ".b");
        if (n["fixed_point"]) {
          const Point xs = point_dim(n["fixed_point"], m, what + ".fixed_point");
          b = xs - A * xs;
        }
        return LipschitzMap::affine(A, b);
      }
      if (kind == "box_projection") {
        return LipschitzMap::box_projection(point_dim(need(n, "lo", what), m, what + ".lo"),
                                            point_dim(need(n, "hi", what), m, what + ".hi"));
      }
      if (kind == "constant") return LipschitzMap::constant(point_dim(need(n, "c", what), m, what + ".c"));
      if (kind == "identity") return LipschitzMap::identity(m);
      if (kind == "zero") return LipschitzMap::zero(m);
    } catch (const std::invalid_argument& e) {
      fail(n, what + ": " + e.what());
    }
    fail(n["kind"], what + ": unknown map kind '" + kind + "'");
  }

  ContractionMap contraction(const YAML::Node& n, int m, const std::string& what) const {
    LipschitzMap L = map(n, m, what);
    try {
      if (n["bound"]) return ContractionMap(std::move(L), num(n["bound"], what + ".bound"));
      return ContractionMap(std::move(L));
    } catch (const std::invalid_argument& e) {
      fail(n, what + ": " + e.what());
    }
  }

  AmbientSpace space(const YAML::Node& n) const {
    keys(n, {"kind", "center", "radius", "lo", "hi"}, "space");
    const auto kind = str(need(n, "kind", "space"), "space.kind");
    try {
      if (kind == "ball") {
        return AmbientSpace::ball(point(need(n, "center", "space"), "space.center"),
                                  num(need(n, "radius", "space"), "space.radius"));
      }
      if (kind == "box") {
        return AmbientSpace::box(point(need(n, "lo", "space"), "space.lo"), point(need(n, "hi", "space"), "space.hi"));
      }
    } catch (const std::invalid_argument& e) {
      fail(n, std::string("space: ") + e.what());
    }
    fail(n["kind"], "unknown space kind '" + kind + "'");
  }

  // One schedule per component; a single schedule is broadcast.
  std::function<Point(std::size_t)> vector_schedule(const YAML::Node& n, int m, const std::string& what) const {
    std::vector<Schedule> parts;
    if (n.IsSequence()) {
      if (static_cast<int>(n.size()) != m) fail(n, what + " needs one schedule per component");
      for (const auto& s : n) parts.push_back(schedule(s, what));
    } else {
      parts.assign(static_cast<std::size_t>(m), schedule(n, what));
    }
    return [parts](std::size_t k) {
      Point p(static_cast<Eigen::Index>(parts.size()));
      for (std::size_t i = 0; i < parts.size(); ++i) p[static_cast<Eigen::Index>(i)] = parts[i](k);
      return p;
    };
  }

  BasicForcing forcing(const YAML::Node& n, int m) const {
    keys(n, {"kind", "z", "gain", "offset", "z0", "ell"}, "forcing");
    const auto kind = str(need(n, "kind", "forcing"), "forcing.kind");
    if (kind == "external") return ExternalForcing{vector_schedule(need(n, "z", "forcing"), m, "forcing.z")};
    if (kind == "feedback") {
      FeedbackForcing fb;
      fb.gain = num(need(n, "gain", "forcing"), "forcing.gain");
      if (n["offset"]) fb.offset = vector_schedule(n["offset"], m, "forcing.offset");
      return fb;
    }
    if (kind == "increment") {
      IncrementForcing inc;
      inc.z0 = point_dim(need(n, "z0", "forcing"), m, "forcing.z0");
      const YAML::Node e = need(n, "ell", "forcing");
      keys(e, {"mode", "value"}, "forcing.ell");
      const auto mode = str(need(e, "mode", "forcing.ell"), "forcing.ell.mode");
      const double v = num(need(e, "value", "forcing.ell"), "forcing.ell.value");
      if (mode == "constant") {
        inc.ell = [v](std::size_t, double) { return v; };
      } else if (mode == "beta_offset") {
        inc.ell = [v](std::size_t, double beta) { return beta + v; };
      } else {
        fail(e["mode"], "unknown ell mode '" + mode + "'");
      }
      return inc;
    }
    fail(n["kind"], "unknown forcing kind '" + kind + "'");
  }

  ComparisonFunction comparison(const YAML::Node& n, const std::string& what) const {
    keys(n, {"kind", "c", "p"}, what);
    const auto kind = str(need(n, "kind", what), what + ".kind");
    try {
      if (kind == "linear") return ComparisonFunction::linear(num(need(n, "c", what), what + ".c"));
      if (kind == "power") {
        return ComparisonFunction::power(num(need(n, "c", what), what + ".c"), num(need(n, "p", what), what + ".p"));
      }
    } catch (const std::invalid_argument& e) {
      fail(n, what + ": " + e.what());
    }
    fail(n["kind"], what + ": unknown comparison function '" + kind + "'");
  }

  MetricSystem companion(const YAML::Node& n) const {
    keys(n, {"kind", "c", "offset", "metric", "Q", "pairs", "omega0", "p"}, "companion");
    const Point w0 = point(need(n, "omega0", "companion"), "companion.omega0");
    const std::size_t p = n["p"] ? count(n["p"], "companion.p") : 1;
    const int wn = static_cast<int>(w0.size());
    const std::string kind = n["kind"] ? str(n["kind"], "companion.kind") : "general";
    try {
      if (kind == "banach") {
        const Point off = n["offset"] ? point_dim(n["offset"], wn, "companion.offset") : Point::Zero(wn);
        return MetricSystem::banach(num(need(n, "c", "companion"), "companion.c"), w0, p, off);
      }
      if (kind != "general") fail(n["kind"], "unknown companion kind '" + kind + "'");
      Metric d = Metric::euclidean();
      if (const YAML::Node mt = n["metric"]) {
        if (mt.IsScalar()) {
          if (mt.Scalar() != "euclidean") fail(mt, "unknown metric '" + mt.Scalar() + "'");
        } else {
          keys(mt, {"weighted_max"}, "companion.metric");
          d = Metric::weighted_max(point_dim(need(mt, "weighted_max", "companion.metric"), wn, "weights"));
        }
      }
      LipschitzMap Q = map(need(n, "Q", "companion"), wn, "companion.Q");
      std::vector<FunctionPair> pairs;
      const YAML::Node ps = need(n, "pairs", "companion");
      if (!ps.IsSequence()) fail(ps, "companion.pairs must be a list");
      for (const auto& pr : ps) {
        keys(pr, {"phi", "psi"}, "companion pair");
        pairs.push_back({comparison(need(pr, "phi", "pair"), "phi"), comparison(need(pr, "psi", "pair"), "psi")});
      }
      return MetricSystem(std::move(d), std::move(Q), std::move(pairs), w0, p);
    } catch (const std::invalid_argument& e) {
      fail(n, std::string("companion: ") + e.what());
    }
  }

  void schedules(const YAML::Node& n, SchemeKind kind, ScheduleSet& set) const {
    keys(n, {"alpha", "beta", "delta", "epsilon", "v", "s", "r"}, "schedules");
    set.beta = schedule(need(n, "beta", "schedules"), "beta");
    const bool viscous = kind != SchemeKind::basic && kind != SchemeKind::halpern;
    if (viscous) set.alpha = schedule(need(n, "alpha", "schedules"), "alpha");
    if (n["delta"]) set.delta = schedule(n["delta"], "delta");
    if (n["epsilon"]) set.epsilon = schedule(n["epsilon"], "epsilon");
    if (const YAML::Node v = n["v"]) {
      if (!v.IsSequence()) fail(v, "schedules.v must be a list of schedules");
      for (const auto& s : v) set.v.push_back(schedule(s, "v"));
    }
    if (const YAML::Node s = n["s"]) {
      if (s.IsSequence()) {
        std::vector<std::size_t> vals;
        for (const auto& e : s) vals.push_back(count(e, "s"));
        set.s = CountSchedule::table(std::move(vals));
      } else {
        set.s = CountSchedule::constant(count(s, "s"));
      }
    }
    set.r = num_or(n, "r", 0.0);
  }

  void diagnostics(const YAML::Node& n, int m, DiagnosticsSpec& d) const {
    keys(n, {"tolerances", "boundedness", "venter", "fixed_point", "permanence", "vi", "positivity", "checks"},
         "diagnostics");
    if (const YAML::Node t = n["tolerances"]) {
      keys(t, {"identity", "tail", "limsup", "telescoping"}, "diagnostics.tolerances");
      d.identity_tol = num_or(t, "identity", d.identity_tol);
      d.tail_tol = num_or(t, "tail", d.tail_tol);
      d.limsup_tol = num_or(t, "limsup", d.limsup_tol);
      d.telescoping_tol = num_or(t, "telescoping", d.telescoping_tol);
    }
    if (const YAML::Node b = n["boundedness"]) {
      keys(b, {"case", "beta_bound", "beta0", "tol"}, "diagnostics.boundedness");
      BoundednessParams p;
      const YAML::Node c = need(b, "case", "diagnostics.boundedness");
      p.which = static_cast<int>(count(c, "boundedness.case"));
      if (p.which < 1 || p.which > 3) fail(c, "boundedness.case must be 1, 2 or 3");
      p.beta_bound = num_or(b, "beta_bound", 0.0);
      p.beta0 = num_or(b, "beta0", 0.0);
      p.tol = num_or(b, "tol", d.tail_tol);
      d.boundedness = p;
    }
    if (const YAML::Node v = n["venter"]) {
      keys(v, {"tol", "min_mass"}, "diagnostics.venter");
      d.venter.tol = num_or(v, "tol", d.venter.tol);
      d.venter.min_mass = num_or(v, "min_mass", d.venter.min_mass);
    }
    if (const YAML::Node f = n["fixed_point"]) {
      keys(f, {"window", "settle_tol"}, "diagnostics.fixed_point");
      if (f["window"]) d.fp_window = count(f["window"], "fixed_point.window");
      d.settle_tol = num_or(f, "settle_tol", d.settle_tol);
    }
    if (const YAML::Node p = n["permanence"]) {
      keys(p, {"k0"}, "diagnostics.permanence");
      if (p["k0"]) d.permanence_k0 = count(p["k0"], "permanence.k0");
    }
    if (const YAML::Node v = n["vi"]) {
      keys(v, {"grid", "samples", "shift", "tol"}, "diagnostics.vi");
      d.vi_tol = num_or(v, "tol", d.vi_tol);
      d.vi = true;
      if (const YAML::Node g = v["grid"]) {
        keys(g, {"lo", "hi", "step"}, "diagnostics.vi.grid");
        ViGrid grid{num(need(g, "lo", "vi.grid"), "lo"), num(need(g, "hi", "vi.grid"), "hi"),
                    num(need(g, "step", "vi.grid"), "step")};
        if (!(grid.step > 0.0) || grid.hi < grid.lo) fail(g, "vi.grid needs lo <= hi and step > 0");
        if (m != 1) fail(g, "vi.grid is only available for scalar schemes");
        d.vi_grid = grid;
      }
      if (v["samples"]) d.vi_samples = count(v["samples"], "vi.samples");
      if (v["shift"]) d.vi_shift = point_dim(v["shift"], m, "vi.shift");
    }
    if (n["positivity"]) d.positivity = boolean(n["positivity"], "diagnostics.positivity");
    if (const YAML::Node c = n["checks"]) {
      if (!c.IsSequence()) fail(c, "diagnostics.checks must be a list");
      for (const auto& e : c) d.checks.push_back(str(e, "check"));
    }
  }

  ExperimentConfig config(const YAML::Node& root) const {
    if (!root.IsMap()) fail(root, "config must be a mapping");
    keys(root,
         {"name", "seed", "horizon", "space", "scheme", "schedules", "maps", "forcing", "companion", "diagnostics",
          "validation", "output"},
         "config");
    ExperimentConfig cfg;
    SchemeConfig& sc = cfg.scheme;
    cfg.name = root["name"] ? str(root["name"], "name") : "run";
    if (root["seed"]) sc.seed = static_cast<std::uint64_t>(count(root["seed"], "seed"));
    sc.horizon = count(need(root, "horizon", "config"), "horizon");
    if (sc.horizon < 1) fail(root["horizon"], "horizon must be >= 1");

    const YAML::Node s = need(root, "scheme", "config");
    keys(s, {"kind", "x0", "xbar0", "clamp", "direction", "aux_variant"}, "scheme");
    const auto kname = str(need(s, "kind", "scheme"), "scheme.kind");
    const auto kind = parse_scheme_kind(kname);
    if (!kind) fail(s["kind"], "unknown scheme kind '" + kname + "'");
    sc.kind = *kind;
    sc.x0 = point(need(s, "x0", "scheme"), "scheme.x0");
    const int m = sc.dim();
    if (s["xbar0"]) sc.xbar0 = point_dim(s["xbar0"], m, "scheme.xbar0");
    if (s["clamp"]) sc.clamp = boolean(s["clamp"], "scheme.clamp");
    if (s["direction"]) sc.direction = point_dim(s["direction"], m, "scheme.direction");
    if (const YAML::Node av = s["aux_variant"]) {
      const auto v = str(av, "scheme.aux_variant");
      if (v == "main_iterate") {
        sc.aux_variant = AuxVariant::main_iterate;
      } else if (v == "own_iterate") {
        sc.aux_variant = AuxVariant::own_iterate;
      } else {
        fail(av, "unknown aux_variant '" + v + "'");
      }
    }

    if (root["space"]) {
      sc.space = space(root["space"]);
      if (sc.space->dim() != m) fail(root["space"], "space dimension differs from x0");
    }
    schedules(need(root, "schedules", "config"), sc.kind, sc.schedules);

    const bool viscous = sc.kind != SchemeKind::basic && sc.kind != SchemeKind::halpern;
    if (sc.kind == SchemeKind::basic) sc.forcing = forcing(need(root, "forcing", "config"), m);
    if (sc.kind == SchemeKind::halpern || viscous) {
      const YAML::Node maps = need(root, "maps", "config");
      keys(maps, {"f", "family", "P"}, "maps");
      if (sc.kind == SchemeKind::halpern) {
        sc.P = map(need(maps, "P", "maps"), m, "maps.P");
      } else {
        sc.f = contraction(need(maps, "f", "maps"), m, "maps.f");
        const YAML::Node fam = need(maps, "family", "maps");
        keys(fam, {"limit", "perturbation", "eta"}, "maps.family");
        LipschitzMap lim = map(need(fam, "limit", "maps.family"), m, "maps.family.limit");
        if (fam["perturbation"]) {
          sc.family.emplace(std::move(lim), map(fam["perturbation"], m, "maps.family.perturbation"),
                            schedule(need(fam, "eta", "maps.family"), "maps.family.eta"));
        } else {
          sc.family.emplace(std::move(lim));
        }
      }
      if (!sc.space) fail(root, "map schemes need a 'space' section");
    }
    if (root["companion"]) sc.companion = companion(root["companion"]);

    if (root["diagnostics"]) diagnostics(root["diagnostics"], m, cfg.diagnostics);

    cfg.validation.profile = viscous ? Profile::standard : Profile::basic;
    if (const YAML::Node v = root["validation"]) {
      keys(v, {"horizon", "tol", "samples", "profile"}, "validation");
      if (v["horizon"]) cfg.validation.horizon = count(v["horizon"], "validation.horizon");
      cfg.validation.tol = num_or(v, "tol", cfg.validation.tol);
      if (v["samples"]) cfg.validation.samples = count(v["samples"], "validation.samples");
      if (const YAML::Node p = v["profile"]) {
        const auto name = str(p, "validation.profile");
        if (name == "standard") {
          cfg.validation.profile = Profile::standard;
        } else if (name == "positive_venter") {
          cfg.validation.profile = Profile::positive_venter;
        } else if (name == "basic") {
          cfg.validation.profile = Profile::basic;
        } else {
          fail(p, "unknown validation profile '" + name + "'");
        }
      }
    }
    if (const YAML::Node o = root["output"]) {
      keys(o, {"dir", "name"}, "output");
      if (o["dir"]) cfg.out_dir = str(o["dir"], "output.dir");
      if (o["name"]) cfg.name = str(o["name"], "output.name");
    }

    try {
      sc.validate();
    } catch (const std::invalid_argument& e) {
      fail(root, e.what());
    }
    return cfg;
  }

 private:
  std::string src_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source_name) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  Parser p(source_name);
  try {
    return p.config(root);
  } catch (const YAML::Exception& e) {
    throw ConfigError(source_name + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ":0: cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentConfig cfg = parse_config(ss.str(), path.string());
  cfg.source = path;
  return cfg;
}

}  // namespace hlab::cli
