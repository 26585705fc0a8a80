#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "starlab/fields.hpp"
#include "starlab/flow.hpp"
#include "starlab/functionals.hpp"

namespace starlab::lab {

struct MetricSpec {
  std::string preset = "flat";  // flat | warped | random-trig
  double amplitude = 1.0;
  int wave = 1;
  unsigned seed = 1;
  double eps = 0.1;
};

struct PhiSpec {
  std::string preset = "zero";  // zero | rotation | compatible-rot | random
  unsigned seed = 1;
};

struct ScalarSpec {
  std::string preset = "constant";  // constant | cos | cos-plus-t-sin | trig
  double a = 1.0;
  double value = 0.0;
  unsigned seed = 1;
  int terms = 4;
  double amplitude = 0.5;
};

struct VectorSpec {
  std::string preset = "zero";  // zero | translation | gaussian | killing
  std::vector<double> components;
  double lambda = 0.0;
};

struct FlowSpec {
  double dt = 1e-3;
  double T = 0.1;
  double tau0 = 1.0;
  double pd_threshold = 1e-12;
  double guard_factor = 0.2;
  int steps() const;
};

struct FunctionalSpec {
  UConvention u_convention = UConvention::Normalized;
  StarScalarMode star_scalar = StarScalarMode::RStar;
  std::string formula_mode = "both";  // chain | paper | both
  double f_integrand_constant = -1.0;
};

struct ChecksSpec {
  int points = 20;
  unsigned seed = 1;
  int bochner_scenarios = 50;
  double t0 = 0.0;                   // F-derivative check time
  std::vector<double> transport_t0;  // empty: T / 2
  int csv_stride = 1;
  int dump_stride = 0;               // 0: first and last step only
};

struct Prop11Spec {
  std::string sigma = "linear";  // linear | general
  double g_drift = 0.0;
  std::vector<double> times{0.1, 0.3};
  int steps = 64;
};

struct OutputSpec {
  std::string report;
  std::string trajectory;
  std::string fields_dir;
};

struct Scenario {
  std::string id;
  Domain domain;
  int N = 32;
  MetricSpec metric;
  PhiSpec phi;
  ScalarSpec f;
  VectorSpec vector;
  FlowSpec flow;
  FdParams fd;
  FunctionalSpec functional;
  ChecksSpec checks;
  Prop11Spec prop11;
  std::map<std::string, double> tolerances;
  OutputSpec output;
  nlohmann::ordered_json merged;  // the config after includes, as read

  double tolerance(const std::string& key) const;
  bool is_torus() const { return domain.kind == DomainKind::Torus; }
};

// Default tolerance table; [tolerances] entries override by key.
const std::map<std::string, double>& default_tolerances();

// Reads a TOML file, resolves `include` chains and validates. Preset names in
// `include` are searched next to the including file, then in
// $STARLAB_PRESET_DIR, then in the preset directory compiled into the build.
Scenario load_config(const std::string& path);
Scenario parse_config(const std::string& toml_text, const std::string& base_dir);

// Validation for a specific suite (torus-only suites on a box fail here).
void require_suite_supported(const Scenario& s, const std::string& suite);
const std::vector<std::string>& suite_names();

// Analytic fields named by the scenario.
AnalyticField metric_field(const Scenario& s);
AnalyticField phi_field(const Scenario& s);
AnalyticField f_field(const Scenario& s);
AnalyticField vector_field(const Scenario& s);
bool vector_is_zero(const Scenario& s);
bool phi_is_zero(const Scenario& s);

GridPtr scenario_grid(const Scenario& s);
CoupledOptions coupled_options(const Scenario& s);

}  // namespace starlab::lab
