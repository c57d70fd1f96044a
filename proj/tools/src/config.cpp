#include "config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <sstream>

#include "gsbound/family.hpp"

namespace gsbound::cli {

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const YAML::Mark& mark, const std::string& msg) const {
    std::ostringstream s;
    s << source_ << ':' << std::max(mark.line, 0) + 1 << ':' << std::max(mark.column, 0) + 1 << ": "
      << msg;
    throw ConfigError(s.str());
  }

  void only_keys(const YAML::Node& map, std::initializer_list<const char*> keys,
                 const std::string& where) const {
    if (!map.IsMap()) fail(map.Mark(), where + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; })) {
        fail(kv.first.Mark(), "unknown key '" + key + "' in " + where);
      }
    }
  }

  YAML::Node require(const YAML::Node& map, const char* key, const std::string& why) const {
    const auto n = map[key];
    if (!n) fail(map.Mark(), "missing required key '" + std::string(key) + "' (" + why + ")");
    return n;
  }

  double number(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n.Mark(), what + " must be a number");
    try {
      const double v = n.as<double>();
      if (!std::isfinite(v)) fail(n.Mark(), what + " must be finite");
      return v;
    } catch (const YAML::BadConversion&) {
      fail(n.Mark(), what + " must be a number, got '" + n.Scalar() + "'");
    }
  }

  long integer(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n.Mark(), what + " must be an integer");
    try {
      return n.as<long>();
    } catch (const YAML::BadConversion&) {
      fail(n.Mark(), what + " must be an integer, got '" + n.Scalar() + "'");
    }
  }

  std::string text(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n.Mark(), what + " must be a string");
    return n.Scalar();
  }

  bool flag(const YAML::Node& n, const std::string& what) const {
    if (!n.IsScalar()) fail(n.Mark(), what + " must be true or false");
    try {
      return n.as<bool>();
    } catch (const YAML::BadConversion&) {
      fail(n.Mark(), what + " must be true or false, got '" + n.Scalar() + "'");
    }
  }

  // A number or a list of numbers.
  Vector vector(const YAML::Node& n, const std::string& what) const {
    if (n.IsScalar()) return Vector::Constant(1, number(n, what));
    if (!n.IsSequence() || n.size() == 0) fail(n.Mark(), what + " must be a number or a non-empty list");
    Vector v(static_cast<Eigen::Index>(n.size()));
    for (std::size_t i = 0; i < n.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = number(n[i], what + "[" + std::to_string(i) + "]");
    }
    return v;
  }

  std::vector<long> integers(const YAML::Node& n, const std::string& what) const {
    if (!n.IsSequence() || n.size() == 0) fail(n.Mark(), what + " must be a non-empty list");
    std::vector<long> v;
    for (std::size_t i = 0; i < n.size(); ++i) v.push_back(integer(n[i], what + "[" + std::to_string(i) + "]"));
    return v;
  }

 private:
  std::string source_;
};

std::optional<Mode> parse_mode(const std::string& s) {
  if (s == "bound") return Mode::bound;
  if (s == "simulate") return Mode::simulate;
  if (s == "sweep") return Mode::sweep;
  if (s == "verify") return Mode::verify;
  if (s == "kolmogorov") return Mode::kolmogorov;
  return std::nullopt;
}

GroupDesign parse_design(const Reader& rd, const YAML::Node& n, int dim) {
  rd.only_keys(n, {"d", "sizes", "n", "groups", "balanced"}, "design");
  const bool has_sizes = static_cast<bool>(n["sizes"]);
  const bool has_n = static_cast<bool>(n["n"]);
  if (has_sizes == has_n) rd.fail(n.Mark(), "design needs either 'sizes' or 'n' with 'groups'");
  try {
    if (has_sizes) return make_design(dim, rd.integers(n["sizes"], "design.sizes"));
    const long total = rd.integer(n["n"], "design.n");
    const int groups = static_cast<int>(rd.integer(rd.require(n, "groups", "design by n"), "design.groups"));
    const bool balanced = n["balanced"] ? rd.flag(n["balanced"], "design.balanced") : true;
    return balanced ? balanced_groups(dim, total, groups) : equal_groups(dim, total, groups);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    rd.fail(n.Mark(), e.what());
  }
}

HNorms parse_norms(const Reader& rd, const YAML::Node& n) {
  HNorms h;
  if (n.IsScalar() && n.Scalar() == "unit") {
    h.sup = h.d1 = 1.0;
    h.d2 = h.d3 = 1.0;
    return h;
  }
  rd.only_keys(n, {"sup", "d1", "d2", "d3", "centered_sup"}, "norms");
  h.sup = rd.number(rd.require(n, "sup", "norms"), "norms.sup");
  h.d1 = rd.number(rd.require(n, "d1", "norms"), "norms.d1");
  if (n["d2"]) h.d2 = rd.number(n["d2"], "norms.d2");
  if (n["d3"]) h.d3 = rd.number(n["d3"], "norms.d3");
  if (n["centered_sup"]) h.centered_sup = rd.number(n["centered_sup"], "norms.centered_sup");
  try {
    h.validate();
  } catch (const Error& e) {
    rd.fail(n.Mark(), e.what());
  }
  return h;
}

std::vector<TestFunction> parse_tests(const Reader& rd, const YAML::Node& n, int q) {
  if (n.IsScalar()) {
    const auto name = n.Scalar();
    auto suite = cosine_suite(q);
    if (name == "suite") return suite;
    for (auto& t : suite) {
      if (t.name == name) return {t};
    }
    std::string known;
    for (const auto& t : suite) known += " " + t.name;
    rd.fail(n.Mark(), "unknown test function '" + name + "'; known: suite" + known);
  }
  rd.only_keys(n, {"kind", "a", "amplitude", "phase", "name"}, "test_function");
  const auto kind = rd.text(rd.require(n, "kind", "test_function"), "test_function.kind");
  const Vector a = rd.vector(rd.require(n, "a", "test_function"), "test_function.a");
  if (a.size() != q) {
    rd.fail(n["a"].Mark(), "test_function.a has " + std::to_string(a.size()) + " entries, expected q = " +
                               std::to_string(q));
  }
  const double amp = n["amplitude"] ? rd.number(n["amplitude"], "test_function.amplitude") : 1.0;
  TestFunction t;
  if (kind == "cosine") {
    const double phase = n["phase"] ? rd.number(n["phase"], "test_function.phase") : 0.0;
    t = cosine_test(a, amp, phase);
  } else if (kind == "product_cosine") {
    if (n["phase"]) rd.fail(n["phase"].Mark(), "phase applies to kind cosine only");
    t = product_cosine_test(a, amp);
  } else {
    rd.fail(n["kind"].Mark(), "test_function.kind must be cosine or product_cosine");
  }
  if (n["name"]) t.name = rd.text(n["name"], "test_function.name");
  return {t};
}

}  // namespace

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::bound: return "bound";
    case Mode::simulate: return "simulate";
    case Mode::sweep: return "sweep";
    case Mode::verify: return "verify";
    case Mode::kolmogorov: return "kolmogorov";
  }
  return "?";
}

const char* path_name(BoundPath p) {
  switch (p) {
    case BoundPath::closed: return "closed";
    case BoundPath::exp_family: return "exp_family";
    case BoundPath::generic: return "generic";
  }
  return "?";
}

const HNorms& RunConfig::bound_norms() const {
  if (norms) return *norms;
  if (tests.empty()) throw ConfigError(source + ": no norms or test function");
  return tests.front().norms;
}

RunConfig load_config(const std::string& path, const Overrides& ov) {
  const Reader rd(path);
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::BadFile&) {
    throw ConfigError(path + ": cannot open config file");
  } catch (const YAML::Exception& e) {
    rd.fail(e.mark, e.msg);
  }
  if (!root.IsMap()) rd.fail(root.Mark(), "config must be a mapping of keys to values");
  rd.only_keys(root,
               {"mode", "model", "design", "theta0", "epsilon", "epsilon_range", "bound", "derivatives",
                "norms", "test_function", "mc", "output", "sweep", "kolmogorov"},
               "config");

  RunConfig c;
  c.source = path;

  if (ov.mode) {
    const auto m = parse_mode(*ov.mode);
    if (!m) throw ConfigError("--mode: unknown mode '" + *ov.mode + "'");
    c.mode = *m;
  } else {
    const auto n = rd.require(root, "mode", "or pass --mode");
    const auto m = parse_mode(rd.text(n, "mode"));
    if (!m) rd.fail(n.Mark(), "mode must be one of bound, simulate, sweep, verify, kolmogorov");
    c.mode = *m;
  }
  const std::string why = std::string("mode ") + mode_name(c.mode);

  if (const auto k = root["kolmogorov"]) {
    rd.only_keys(k, {"smooth_distance", "p", "m", "c1", "c2", "empirical", "grid"}, "kolmogorov");
    auto& ks = c.kolmogorov;
    if (k["smooth_distance"]) {
      ks.smooth_distance = rd.number(k["smooth_distance"], "kolmogorov.smooth_distance");
      if (*ks.smooth_distance < 0.0) rd.fail(k["smooth_distance"].Mark(), "smooth_distance must be >= 0");
    }
    if (k["p"]) {
      ks.p = static_cast<int>(rd.integer(k["p"], "kolmogorov.p"));
      if (*ks.p < 2) rd.fail(k["p"].Mark(), "kolmogorov.p must be >= 2");
    }
    if (k["m"]) {
      ks.m = static_cast<int>(rd.integer(k["m"], "kolmogorov.m"));
      if (ks.m < 1 || ks.m > 8) rd.fail(k["m"].Mark(), "kolmogorov.m must be in 1..8");
    }
    if (k["c1"]) ks.c1 = rd.number(k["c1"], "kolmogorov.c1");
    if (k["c2"]) ks.c2 = rd.number(k["c2"], "kolmogorov.c2");
    if (k["empirical"]) ks.empirical = rd.flag(k["empirical"], "kolmogorov.empirical");
    if (k["grid"]) {
      const auto g = rd.text(k["grid"], "kolmogorov.grid");
      if (g == "exact") ks.grid_mode = KolMode::exact;
      else if (g != "grid") rd.fail(k["grid"].Mark(), "kolmogorov.grid must be exact or grid");
    }
  }
  // A given smooth distance makes the model inputs optional, unless the
  // empirical check needs them.
  const bool kol_standalone =
      c.mode == Mode::kolmogorov && c.kolmogorov.smooth_distance && !c.kolmogorov.empirical;
  const bool needs_model = !kol_standalone;

  if (const auto s = root["sweep"]) {
    rd.only_keys(s, {"ns", "groups", "empirical"}, "sweep");
    if (c.mode == Mode::sweep) {
      c.sweep.ns = rd.integers(rd.require(s, "ns", why), "sweep.ns");
      if (c.sweep.ns.size() < 3) rd.fail(s["ns"].Mark(), "sweep.ns needs at least three sample sizes");
      for (std::size_t i = 0; i < c.sweep.ns.size(); ++i) {
        if (c.sweep.ns[i] < 1) rd.fail(s["ns"][i].Mark(), "sample sizes must be positive");
      }
      if (s["groups"]) c.sweep.groups = static_cast<int>(rd.integer(s["groups"], "sweep.groups"));
      if (c.sweep.groups < 1) rd.fail(s["groups"].Mark(), "sweep.groups must be >= 1");
      if (s["empirical"]) c.sweep.empirical = rd.flag(s["empirical"], "sweep.empirical");
    }
  } else if (c.mode == Mode::sweep) {
    rd.require(root, "sweep", why);
  }

  if (needs_model || root["model"]) {
    const auto n = rd.require(root, "model", why);
    c.model_name = rd.text(n, "model");
    try {
      c.model = make_model(c.model_name);
    } catch (const Error&) {
      std::string known;
      for (const auto& m : registered_models()) known += " " + m;
      rd.fail(n.Mark(), "unknown model '" + c.model_name + "'; known:" + known);
    }
    c.dim = c.model->dim_param();
  }

  if (const auto d = root["design"]; d && d.IsMap() && d["d"] && c.model) {
    const long dd = rd.integer(d["d"], "design.d");
    if (dd != c.dim) {
      rd.fail(d["d"].Mark(), "design.d = " + std::to_string(dd) + " but model '" + c.model_name +
                                 "' has dimension " + std::to_string(c.dim));
    }
  }
  const bool needs_design = needs_model && c.mode != Mode::sweep;
  if (needs_design || (root["design"] && c.model)) {
    const auto n = rd.require(root, "design", why);
    if (c.mode == Mode::sweep) {
      rd.only_keys(n, {"d"}, "design (sweep mode takes sizes from sweep.ns)");
    } else {
      c.design = parse_design(rd, n, c.dim);
    }
  }

  if (needs_model) {
    const auto n = rd.require(root, "theta0", why);
    c.theta0 = rd.vector(n, "theta0");
    if (c.theta0.size() != c.dim) {
      rd.fail(n.Mark(), "theta0 has " + std::to_string(c.theta0.size()) + " entries, model '" + c.model_name +
                            "' has dimension " + std::to_string(c.dim));
    }
    if (!c.model->admissible(c.theta0)) rd.fail(n.Mark(), "theta0 is outside the parameter space of '" + c.model_name + "'");
  }

  if (c.model) {
    const bool is_exp = c.model_name == "exponential";
    c.path = is_exp ? BoundPath::closed : c.model->exp_family() ? BoundPath::exp_family : BoundPath::generic;
    if (const auto b = root["bound"]) {
      const auto s = rd.text(b, "bound");
      if (s == "closed") {
        if (!is_exp) rd.fail(b.Mark(), "bound 'closed' is available for model 'exponential' only");
        c.path = BoundPath::closed;
      } else if (s == "exp_family") {
        if (!c.model->exp_family()) rd.fail(b.Mark(), "model '" + c.model_name + "' is not an exponential family");
        c.path = BoundPath::exp_family;
      } else if (s == "generic") {
        c.path = BoundPath::generic;
      } else {
        rd.fail(b.Mark(), "bound must be closed, exp_family or generic");
      }
    }
    if (const auto dv = root["derivatives"]) {
      const auto s = rd.text(dv, "derivatives");
      if (s == "two") c.derivatives = Derivatives::two;
      else if (s != "three") rd.fail(dv.Mark(), "derivatives must be three or two");
      if (c.derivatives == Derivatives::two && c.path != BoundPath::generic) {
        rd.fail(dv.Mark(), "derivatives 'two' needs bound 'generic'");
      }
    }
  }

  if (needs_model) {
    const auto n = rd.require(root, "epsilon", why);
    if (n.IsScalar() && n.Scalar() == "auto") {
      c.epsilon_auto = true;
    } else {
      c.epsilon = rd.number(n, "epsilon");
      if (!(c.epsilon > 0.0)) rd.fail(n.Mark(), "epsilon must be positive or 'auto'");
      if (c.path == BoundPath::closed && !(c.epsilon < c.theta0(0))) {
        rd.fail(n.Mark(), "the closed exponential bound needs epsilon < theta0");
      }
    }
    if (c.path == BoundPath::closed) c.epsilon_range = {1e-3 * c.theta0(0), 0.999 * c.theta0(0)};
    else c.epsilon_range = {1e-3, 1.0};
    if (const auto r = root["epsilon_range"]) {
      const Vector v = rd.vector(r, "epsilon_range");
      if (v.size() != 2 || !(v(0) > 0.0) || !(v(0) < v(1))) rd.fail(r.Mark(), "epsilon_range must be [lo, hi] with 0 < lo < hi");
      if (c.path == BoundPath::closed && !(v(1) < c.theta0(0))) rd.fail(r.Mark(), "epsilon_range must stay below theta0 for the closed bound");
      c.epsilon_range = {v(0), v(1)};
    }
    if (!c.epsilon_auto) c.epsilon_range = {c.epsilon, c.epsilon};
  }

  if (root["norms"]) c.norms = parse_norms(rd, root["norms"]);
  if (const auto t = root["test_function"]) {
    if (c.model) {
      const int kk = c.mode == Mode::sweep ? c.sweep.groups : c.design ? c.design->analyses() : 1;
      c.tests = parse_tests(rd, t, c.dim * kk);
    }
  }
  const bool needs_norms =
      c.mode == Mode::bound || c.mode == Mode::sweep || (c.mode == Mode::kolmogorov && !c.kolmogorov.smooth_distance);
  if (needs_norms && !c.norms && c.tests.empty()) {
    rd.fail(root.Mark(), "missing required key 'norms' or 'test_function' (" + why + ")");
  }
  if (c.mode == Mode::simulate && c.tests.empty()) c.tests = cosine_suite(c.design->stacked_dim());
  if (c.mode == Mode::sweep && c.sweep.empirical && c.tests.empty()) {
    rd.fail(root["sweep"]["empirical"].Mark(), "sweep.empirical needs a test_function");
  }
  if (c.tests.size() > 1 && c.mode != Mode::simulate) {
    rd.fail(root["test_function"].Mark(), "a test function suite is only accepted in simulate mode");
  }
  if (c.derivatives == Derivatives::three && c.norms && (!c.norms->d2 || !c.norms->d3) &&
      c.mode != Mode::simulate) {
    rd.fail(root["norms"].Mark(), "norms need d2 and d3 for the three-derivative bound");
  }

  if (const auto m = root["mc"]) {
    rd.only_keys(m, {"replications", "seed", "discard_threshold", "aggregate"}, "mc");
    if (m["replications"]) {
      c.mc.replications = rd.integer(m["replications"], "mc.replications");
      if (c.mc.replications < 1) rd.fail(m["replications"].Mark(), "mc.replications must be >= 1");
    }
    if (m["seed"]) {
      try {
        c.mc.seed = m["seed"].as<std::uint64_t>();
      } catch (const YAML::BadConversion&) {
        rd.fail(m["seed"].Mark(), "mc.seed must be a nonnegative integer");
      }
    }
    if (m["discard_threshold"]) {
      c.mc.discard_threshold = rd.number(m["discard_threshold"], "mc.discard_threshold");
      if (c.mc.discard_threshold < 0.0 || c.mc.discard_threshold > 1.0) {
        rd.fail(m["discard_threshold"].Mark(), "mc.discard_threshold must be in [0, 1]");
      }
    }
    if (m["aggregate"]) c.mc.aggregate = rd.flag(m["aggregate"], "mc.aggregate");
  }
  if (ov.seed) c.mc.seed = *ov.seed;
  if (ov.reps) {
    if (*ov.reps < 1) throw ConfigError("--reps must be >= 1");
    c.mc.replications = *ov.reps;
  }
  if (ov.workers) c.mc.workers = *ov.workers;

  if (const auto o = root["output"]) {
    rd.only_keys(o, {"dir", "report", "csv", "replicates"}, "output");
    if (o["dir"]) c.out_dir = rd.text(o["dir"], "output.dir");
    if (o["report"]) c.report_file = rd.text(o["report"], "output.report");
    if (o["csv"]) c.csv_file = rd.text(o["csv"], "output.csv");
    if (o["replicates"]) c.replicate_file = rd.text(o["replicates"], "output.replicates");
  }
  if (ov.out_dir) c.out_dir = *ov.out_dir;
  return c;
}

}  // namespace gsbound::cli
