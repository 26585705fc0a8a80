#include "lab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "starlab/errors.hpp"
#include "starlab/presets.hpp"

#ifndef STARLAB_PRESET_DIR_DEFAULT
#define STARLAB_PRESET_DIR_DEFAULT ""
#endif

namespace starlab::lab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorKind::Config, msg); }

json to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json o = json::object();
    for (auto&& [k, v] : *t) o[std::string(k.str())] = to_json(v);
    return o;
  }
  if (const auto* a = node.as_array()) {
    json arr = json::array();
    for (auto&& v : *a) arr.push_back(to_json(v));
    return arr;
  }
  if (const auto* s = node.as_string()) return s->get();
  if (const auto* i = node.as_integer()) return i->get();
  if (const auto* f = node.as_floating_point()) return f->get();
  if (const auto* b = node.as_boolean()) return b->get();
  config_error("dates and times are not accepted in configs");
}

void deep_merge(json& base, const json& over) {
  for (auto it = over.begin(); it != over.end(); ++it) {
    if (it.value().is_object() && base.contains(it.key()) && base[it.key()].is_object())
      deep_merge(base[it.key()], it.value());
    else
      base[it.key()] = it.value();
  }
}

json parse_toml(const std::string& text, const std::string& source) {
  try {
    return to_json(toml::parse(text, source));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << e.source().begin.line << ": " << e.description();
    config_error(os.str());
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path find_include(const std::string& name, const fs::path& base_dir) {
  std::vector<fs::path> dirs{base_dir};
  if (const char* env = std::getenv("STARLAB_PRESET_DIR"); env != nullptr && *env != '\0') dirs.emplace_back(env);
  if (*STARLAB_PRESET_DIR_DEFAULT != '\0') dirs.emplace_back(STARLAB_PRESET_DIR_DEFAULT);
  for (const auto& d : dirs)
    for (const std::string& cand : {name, name + ".toml"}) {
      const fs::path p = fs::path(cand).is_absolute() ? fs::path(cand) : d / cand;
      if (fs::is_regular_file(p)) return p;
    }
  config_error("include '" + name + "' not found");
}

json resolve(const json& doc, const fs::path& base_dir, int depth) {
  if (depth > 8) config_error("include nesting deeper than 8");
  json out = json::object();
  if (doc.contains("include")) {
    std::vector<std::string> names;
    const auto& inc = doc["include"];
    if (inc.is_string()) {
      names.push_back(inc.get<std::string>());
    } else if (inc.is_array()) {
      for (const auto& v : inc) {
        if (!v.is_string()) config_error("include entries must be strings");
        names.push_back(v.get<std::string>());
      }
    } else {
      config_error("include must be a string or a list of strings");
    }
    for (const auto& name : names) {
      const fs::path p = find_include(name, base_dir);
      deep_merge(out, resolve(parse_toml(read_file(p), p.string()), p.parent_path(), depth + 1));
    }
  }
  json own = doc;
  own.erase("include");
  deep_merge(out, own);
  return out;
}

// Typed reads from one section with unknown-key detection.
class Section {
 public:
  Section(const json& root, std::string name) : name_(std::move(name)) {
    if (!root.contains(name_)) return;
    const auto& v = root[name_];
    if (!v.is_object()) config_error("[" + name_ + "] must be a table");
    node_ = &v;
  }

  double number(const std::string& key, double def) {
    const json* v = take(key);
    if (v == nullptr) return def;
    if (!v->is_number()) config_error(where(key) + " must be a number");
    return v->get<double>();
  }
  long long integer(const std::string& key, long long def) {
    const json* v = take(key);
    if (v == nullptr) return def;
    if (!v->is_number_integer()) config_error(where(key) + " must be an integer");
    return v->get<long long>();
  }
  std::string string(const std::string& key, const std::string& def) {
    const json* v = take(key);
    if (v == nullptr) return def;
    if (!v->is_string()) config_error(where(key) + " must be a string");
    return v->get<std::string>();
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    const json* v = take(key);
    if (v == nullptr) return def;
    if (!v->is_array()) config_error(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) config_error(where(key) + " must be an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }
  std::string choice(const std::string& key, const std::string& def, std::initializer_list<const char*> allowed) {
    const std::string v = string(key, def);
    for (const char* a : allowed)
      if (v == a) return v;
    std::string list;
    for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
    config_error(where(key) + " = '" + v + "' is not one of: " + list);
  }
  // Every key present must have been read.
  void finish() const {
    if (node_ == nullptr) return;
    for (auto it = node_->begin(); it != node_->end(); ++it)
      if (!seen_.count(it.key())) config_error("unknown key " + where(it.key()));
  }
  std::string where(const std::string& key) const { return name_ + "." + key; }

 private:
  const json* take(const std::string& key) {
    seen_.insert(key);
    if (node_ == nullptr || !node_->contains(key)) return nullptr;
    return &(*node_)[key];
  }

  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

unsigned as_seed(long long v, const std::string& where) {
  if (v < 0 || v > 0xffffffffLL) config_error(where + " must be in [0, 2^32)");
  return static_cast<unsigned>(v);
}

bool is_step_multiple(double x, double dt) {
  const double k = x / dt;
  return std::abs(k - std::round(k)) <= 1e-9 * std::max(1.0, std::abs(k));
}

Scenario build(const json& merged, const std::string& default_id) {
  static const std::set<std::string> kTop{"include", "scenario", "domain", "metric", "phi", "f", "vector",
                                          "flow", "fd", "functional", "checks", "prop11", "tolerances", "output"};
  for (auto it = merged.begin(); it != merged.end(); ++it)
    if (!kTop.count(it.key())) config_error("unknown top-level key '" + it.key() + "'");

  Scenario s;
  s.merged = merged;
  if (merged.contains("scenario")) {
    if (!merged["scenario"].is_string()) config_error("scenario must be a string");
    s.id = merged["scenario"].get<std::string>();
  } else {
    s.id = default_id;
  }

  {
    Section d(merged, "domain");
    const std::string kind = d.choice("kind", "torus", {"torus", "box"});
    const long long dim = d.integer("dim", 3);
    if (dim < 2 || dim > 5) config_error("domain.dim must be in [2, 5]");
    const int n = static_cast<int>(dim);
    const long long N = d.integer("N", 32);
    if (N % 2 != 0) config_error("domain.N must be even (got " + std::to_string(N) + ")");
    if (N < 4 || N > 256) config_error("domain.N must be in [4, 256]");
    s.N = static_cast<int>(N);
    if (kind == "torus") {
      auto radii = d.numbers("radii", std::vector<double>(static_cast<std::size_t>(n), 1.0));
      if (static_cast<int>(radii.size()) != n) config_error("domain.radii needs dim entries");
      for (double r : radii)
        if (!(r > 0.0)) config_error("domain.radii must be positive");
      s.domain = Domain::torus(n, radii);
      d.numbers("lower", {});
      d.numbers("upper", {});
    } else {
      auto lo = d.numbers("lower", std::vector<double>(static_cast<std::size_t>(n), -1.0));
      auto hi = d.numbers("upper", std::vector<double>(static_cast<std::size_t>(n), 1.0));
      if (static_cast<int>(lo.size()) != n || static_cast<int>(hi.size()) != n)
        config_error("domain.lower and domain.upper need dim entries");
      for (int a = 0; a < n; ++a)
        if (!(lo[a] < hi[a])) config_error("domain.lower must be below domain.upper");
      s.domain = Domain::box(lo, hi);
      d.numbers("radii", {});
    }
    d.finish();
  }
  const int n = s.domain.dim;

  {
    Section m(merged, "metric");
    s.metric.preset = m.choice("preset", "flat", {"flat", "warped", "random-trig"});
    s.metric.amplitude = m.number("amplitude", 1.0);
    s.metric.wave = static_cast<int>(m.integer("wave", 1));
    s.metric.seed = as_seed(m.integer("seed", 1), "metric.seed");
    s.metric.eps = m.number("eps", 0.1);
    m.finish();
    if (s.metric.wave < 1) config_error("metric.wave must be >= 1");
    if (s.metric.preset == "random-trig" && !(s.metric.eps > 0.0 && s.metric.eps < 0.5 / n))
      config_error("metric.eps must be in (0, 1/(2 dim)) to keep the metric positive definite");
  }
  {
    Section p(merged, "phi");
    s.phi.preset = p.choice("preset", "zero", {"zero", "rotation", "compatible-rot", "random"});
    s.phi.seed = as_seed(p.integer("seed", 1), "phi.seed");
    p.finish();
    if (s.phi.preset == "compatible-rot" && s.metric.preset != "warped")
      config_error("phi.preset = 'compatible-rot' needs metric.preset = 'warped'");
  }
  {
    Section f(merged, "f");
    s.f.preset = f.choice("preset", "constant", {"constant", "cos", "cos-plus-t-sin", "trig"});
    s.f.a = f.number("a", 1.0);
    s.f.value = f.number("value", 0.0);
    s.f.seed = as_seed(f.integer("seed", 1), "f.seed");
    s.f.terms = static_cast<int>(f.integer("terms", 4));
    s.f.amplitude = f.number("amplitude", 0.5);
    f.finish();
    if (s.f.terms < 1) config_error("f.terms must be >= 1");
  }
  {
    Section v(merged, "vector");
    s.vector.preset = v.choice("preset", "zero", {"zero", "translation", "gaussian", "killing"});
    s.vector.components = v.numbers("components", {});
    s.vector.lambda = v.number("lambda", 0.0);
    v.finish();
    if (s.vector.preset == "translation" && static_cast<int>(s.vector.components.size()) != n)
      config_error("vector.components needs dim entries for a translation");
  }
  {
    Section f(merged, "flow");
    s.flow.dt = f.number("dt", 1e-3);
    s.flow.T = f.number("T", 0.1);
    s.flow.tau0 = f.number("tau0", 1.0);
    s.flow.pd_threshold = f.number("pd_threshold", 1e-12);
    s.flow.guard_factor = f.number("guard_factor", 0.2);
    f.finish();
    if (!(s.flow.dt > 0.0) || !(s.flow.T > 0.0) || !(s.flow.tau0 > 0.0))
      config_error("flow.dt, flow.T and flow.tau0 must be positive");
    if (!(s.flow.T < s.flow.tau0)) config_error("flow.T must be below flow.tau0");
    if (!is_step_multiple(s.flow.T, s.flow.dt)) config_error("flow.T must be a whole number of flow.dt steps");
    if (!(s.flow.pd_threshold > 0.0) || !(s.flow.guard_factor > 0.0))
      config_error("flow.pd_threshold and flow.guard_factor must be positive");
  }
  {
    Section f(merged, "fd");
    s.fd.h0 = f.number("h0", 1e-3);
    s.fd.levels = static_cast<int>(f.integer("levels", 3));
    f.finish();
    if (!(s.fd.h0 > 0.0)) config_error("fd.h0 must be positive");
    if (s.fd.levels < 1 || s.fd.levels > 6) config_error("fd.levels must be in [1, 6]");
  }
  {
    Section f(merged, "functional");
    const auto conv = f.choice("u_convention", "normalized", {"normalized", "literal"});
    s.functional.u_convention = conv == "literal" ? UConvention::Literal : UConvention::Normalized;
    const auto star = f.choice("star_scalar", "r_star", {"r_star", "trace_s_star", "scalar"});
    s.functional.star_scalar = star == "scalar"         ? StarScalarMode::Scalar
                               : star == "trace_s_star" ? StarScalarMode::TraceSStar
                                                        : StarScalarMode::RStar;
    s.functional.formula_mode = f.choice("formula_mode", "both", {"both", "chain", "paper"});
    s.functional.f_integrand_constant = f.number("f_integrand_constant", -1.0);
    f.finish();
  }
  {
    Section c(merged, "checks");
    s.checks.points = static_cast<int>(c.integer("points", 20));
    s.checks.seed = as_seed(c.integer("seed", 1), "checks.seed");
    s.checks.bochner_scenarios = static_cast<int>(c.integer("bochner_scenarios", 50));
    s.checks.t0 = c.number("t0", 0.0);
    s.checks.transport_t0 = c.numbers("transport_t0", {});
    s.checks.csv_stride = static_cast<int>(c.integer("csv_stride", 1));
    s.checks.dump_stride = static_cast<int>(c.integer("dump_stride", 0));
    c.finish();
    if (s.checks.points < 1 || s.checks.bochner_scenarios < 1) config_error("checks counts must be >= 1");
    if (s.checks.csv_stride < 1 || s.checks.dump_stride < 0) config_error("checks strides must be positive");
    if (s.checks.transport_t0.empty()) {
      const int half = s.flow.steps() / 2;
      s.checks.transport_t0.push_back(half * s.flow.dt);
    }
    const double w = 4.0 * s.flow.dt;
    for (double t0 : s.checks.transport_t0) {
      if (!is_step_multiple(t0, s.flow.dt)) config_error("checks.transport_t0 entries must be multiples of flow.dt");
      if (t0 - w < -1e-12 || t0 + w > s.flow.T + 1e-12)
        config_error("checks.transport_t0 entries need 4 steps of trajectory on each side");
    }
  }
  {
    Section p(merged, "prop11");
    s.prop11.sigma = p.choice("sigma", "linear", {"linear", "general"});
    s.prop11.g_drift = p.number("g_drift", 0.0);
    s.prop11.times = p.numbers("times", {0.1, 0.3});
    s.prop11.steps = static_cast<int>(p.integer("steps", 64));
    p.finish();
    if (s.prop11.times.empty()) config_error("prop11.times must not be empty");
    if (s.prop11.steps < 1) config_error("prop11.steps must be >= 1");
  }
  s.tolerances = default_tolerances();
  if (merged.contains("tolerances")) {
    const auto& t = merged["tolerances"];
    if (!t.is_object()) config_error("[tolerances] must be a table");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (!s.tolerances.count(it.key())) config_error("unknown tolerance '" + it.key() + "'");
      if (!it.value().is_number() || !(it.value().get<double>() > 0.0))
        config_error("tolerances." + it.key() + " must be a positive number");
      s.tolerances[it.key()] = it.value().get<double>();
    }
  }
  {
    Section o(merged, "output");
    s.output.report = o.string("report", "");
    s.output.trajectory = o.string("trajectory", "");
    s.output.fields_dir = o.string("fields_dir", "");
    o.finish();
  }

  // Trig presets have period 2 pi per axis; other radii would break periodicity.
  if (s.is_torus()) {
    bool varying = s.metric.preset != "flat" || s.phi.preset == "compatible-rot" || s.phi.preset == "random" ||
                   s.f.preset != "constant";
    bool unit = true;
    for (double r : s.domain.radii) unit = unit && r == 1.0;
    if (varying && !unit) config_error("spatially varying presets need unit torus radii");
  }
  return s;
}

}  // namespace

int FlowSpec::steps() const { return static_cast<int>(std::lround(T / dt)); }

const std::map<std::string, double>& default_tolerances() {
  static const std::map<std::string, double> t{
      {"identities_analytic", 1e-9}, {"identities_grid", 1e-7},  {"prop11_steady", 1e-12},
      {"prop11_derivative", 1e-5},   {"prop11_flow", 1e-5},      {"prop11_scaling", 1e-8},
      {"prop12", 1e-6},              {"thm21", 1e-4},            {"thm31", 1e-4},
      {"thm31_closed_form", 1e-6},   {"thm31_box_star_u", 1e-8}, {"bochner", 1e-7},
      {"conservation_mass", 1e-6},   {"conservation_literal", 1e-6},
  };
  return t;
}

double Scenario::tolerance(const std::string& key) const {
  auto it = tolerances.find(key);
  if (it == tolerances.end()) fail(ErrorKind::InvalidArgument, "no tolerance named " + key);
  return it->second;
}

Scenario load_config(const std::string& path) {
  const fs::path p(path);
  if (!fs::is_regular_file(p)) fail(ErrorKind::Config, "config file not found: " + path);
  const json doc = parse_toml(read_file(p), p.string());
  return build(resolve(doc, p.parent_path(), 0), p.stem().string());
}

Scenario parse_config(const std::string& toml_text, const std::string& base_dir) {
  const json doc = parse_toml(toml_text, "<string>");
  return build(resolve(doc, base_dir.empty() ? fs::current_path() : fs::path(base_dir), 0), "inline");
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "prop11", "prop12",       "thm21",
                                              "thm31",      "bochner", "conservation", "all"};
  return names;
}

void require_suite_supported(const Scenario& s, const std::string& suite) {
  bool known = false;
  for (const auto& n : suite_names()) known = known || n == suite;
  if (!known) config_error("unknown suite '" + suite + "'");
  const bool torus_only = suite == "thm21" || suite == "thm31" || suite == "conservation";
  if (torus_only && !s.is_torus()) config_error("suite '" + suite + "' needs a torus domain");
}

AnalyticField metric_field(const Scenario& s) {
  const int n = s.domain.dim;
  if (s.metric.preset == "warped") return presets::warped_metric(n, s.metric.amplitude, s.metric.wave);
  if (s.metric.preset == "random-trig") return presets::random_trig_metric(n, s.metric.seed, s.metric.eps);
  return presets::flat_metric(n);
}

AnalyticField phi_field(const Scenario& s) {
  const int n = s.domain.dim;
  if (s.phi.preset == "rotation") return presets::rotation_phi(n);
  if (s.phi.preset == "compatible-rot") return presets::compatible_rotation_phi(n, s.metric.amplitude, s.metric.wave);
  if (s.phi.preset == "random") return presets::random_phi(n, s.phi.seed);
  return presets::zero_tensor(n);
}

AnalyticField f_field(const Scenario& s) {
  const int n = s.domain.dim;
  if (s.f.preset == "cos") return presets::cos_scalar(n, s.f.a);
  if (s.f.preset == "cos-plus-t-sin") return presets::cos_plus_t_sin_scalar(n, s.f.a);
  if (s.f.preset == "trig") return presets::random_trig_scalar(n, s.f.seed, s.f.terms, s.f.amplitude);
  return presets::constant_scalar(n, s.f.value);
}

AnalyticField vector_field(const Scenario& s) {
  const int n = s.domain.dim;
  if (s.vector.preset == "translation") return presets::constant_vector(s.vector.components);
  if (s.vector.preset == "gaussian") return presets::linear_vector(n, -s.vector.lambda);
  if (s.vector.preset == "killing") {
    std::vector<double> c(static_cast<std::size_t>(n), 0.0);
    c.back() = 1.0;
    return presets::constant_vector(c);
  }
  return presets::zero_vector(n);
}

bool vector_is_zero(const Scenario& s) {
  if (s.vector.preset == "zero") return true;
  if (s.vector.preset == "gaussian") return s.vector.lambda == 0.0;
  if (s.vector.preset == "translation") {
    for (double c : s.vector.components)
      if (c != 0.0) return false;
    return true;
  }
  return false;
}

bool phi_is_zero(const Scenario& s) { return s.phi.preset == "zero"; }

GridPtr scenario_grid(const Scenario& s) {
  if (!s.is_torus()) fail(ErrorKind::Config, "grid fields need a torus domain");
  return make_grid(s.domain, s.N);
}

CoupledOptions coupled_options(const Scenario& s) {
  CoupledOptions o;
  o.dt = s.flow.dt;
  o.horizon = s.flow.T;
  o.tau0 = s.flow.tau0;
  o.star_scalar = s.functional.star_scalar;
  o.convention = s.functional.u_convention;
  o.flow.pd_threshold = s.flow.pd_threshold;
  o.flow.guard_factor = s.flow.guard_factor;
  return o;
}

}  // namespace starlab::lab
