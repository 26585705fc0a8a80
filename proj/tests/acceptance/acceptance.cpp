// Acceptance runner: one PASS/FAIL line per criterion, driven through the C API.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <json.hpp>

#include "starlab/starlab.h"

#ifndef STARLAB_ACCEPTANCE_DIR
#error "STARLAB_ACCEPTANCE_DIR must point at tests/acceptance"
#endif

namespace {

using json = nlohmann::json;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string config_path(const char* name) { return std::string(STARLAB_ACCEPTANCE_DIR) + "/" + name + ".toml"; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Runs a suite and returns the report JSON text, or "" with the error in `out`.
std::string run_report(const char* config, const char* suite, Outcome& out) {
  starlab_config* cfg = nullptr;
  if (starlab_config_load(config_path(config).c_str(), &cfg) != STARLAB_OK) {
    out.require(false, std::string(config) + ": " + starlab_last_error());
    return "";
  }
  starlab_report* rep = nullptr;
  std::string text;
  if (starlab_run_suite(cfg, suite, &rep) == STARLAB_OK) {
    char* s = nullptr;
    if (starlab_report_to_json(rep, &s) == STARLAB_OK) text = s;
    starlab_string_free(s);
  } else {
    out.require(false, std::string(config) + ": " + starlab_last_error());
  }
  starlab_report_free(rep);
  starlab_config_free(cfg);
  return text;
}

double row_error(const json& row) {
  const auto& key = row["rule"] == "absolute" ? row["abs_err"] : row["rel_err"];
  return key.is_number() ? key.get<double>() : NAN;
}

bool has_prefix(const std::string& s, const std::string& p) { return s.compare(0, p.size(), p) == 0; }

// Every asserted row whose id starts with `prefix` must meet `tol`; at least `min_rows` of them.
void rows_within(const json& report, const std::string& prefix, double tol, std::size_t min_rows, Outcome& out) {
  std::size_t seen = 0;
  double worst = 0.0;
  for (const auto& row : report["rows"]) {
    const std::string id = row["check_id"];
    if (!has_prefix(id, prefix) || row["status"] == "diagnostic") continue;
    ++seen;
    const double e = row_error(row);
    if (!(e <= tol)) out.require(false, id + " err " + fmt("%.3e", e) + " > " + fmt("%.0e", tol));
    if (std::isfinite(e)) worst = std::max(worst, e);
  }
  out.require(seen >= min_rows, prefix + ": " + std::to_string(seen) + " rows, expected " + std::to_string(min_rows));
  out.note(prefix + "* worst " + fmt("%.2e", worst));
}

// Diagnostic rows with this prefix must exist; their largest residual is logged.
void diagnostics_logged(const json& report, const std::string& prefix, Outcome& out) {
  std::size_t seen = 0;
  double largest = 0.0;
  for (const auto& row : report["rows"]) {
    if (!has_prefix(row["check_id"].get<std::string>(), prefix)) continue;
    out.require(row["status"] == "diagnostic", std::string(row["check_id"]) + " should be diagnostic");
    ++seen;
    if (row["abs_err"].is_number()) largest = std::max(largest, row["abs_err"].get<double>());
  }
  out.require(seen > 0, "no " + prefix + " rows");
  out.note(prefix + " residual " + fmt("%.3e", largest));
}

const json* find_row(const json& report, const std::string& prefix) {
  for (const auto& row : report["rows"])
    if (has_prefix(row["check_id"].get<std::string>(), prefix)) return &row;
  return nullptr;
}

json parse(const std::string& text) { return text.empty() ? json{{"rows", json::array()}} : json::parse(text); }

Outcome identities() {
  Outcome out;
  const json r = parse(run_report("identities_warped3", "identities", out));
  rows_within(r, "identities.analytic.", 1e-9, 7, out);
  rows_within(r, "identities.grid.", 1e-7, 7, out);
  return out;
}

Outcome flat_stationarity() {
  Outcome out;
  namespace fs = std::filesystem;
  const fs::path csv = fs::temp_directory_path() / ("starlab_flat_" + std::to_string(::getpid()) + ".csv");
  starlab_config* cfg = nullptr;
  if (starlab_config_load(config_path("flat_stationarity").c_str(), &cfg) != STARLAB_OK) {
    out.require(false, starlab_last_error());
    return out;
  }
  const auto st = starlab_run_flow(cfg, csv.c_str(), nullptr, 1);
  starlab_config_free(cfg);
  if (st != STARLAB_OK) {
    out.require(false, starlab_last_error());
    return out;
  }
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  out.require(line == "t,tau,min_eig_g,int_u_dV,metric_change", "unexpected CSV header " + line);
  std::size_t rows = 0;
  double worst = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    const double change = std::stod(line.substr(line.rfind(',') + 1));
    worst = std::max(worst, std::isfinite(change) ? change : INFINITY);
  }
  fs::remove(csv);
  out.require(rows == 101, "expected 101 CSV rows (100 steps), got " + std::to_string(rows));
  out.require(worst < 1e-12, "max |g(t) - g(0)| = " + fmt("%.3e", worst));
  out.note("max |g(t) - g(0)| " + fmt("%.2e", worst));
  return out;
}

Outcome f_closed_form() {
  Outcome out;
  using boost::math::quadrature::gauss_kronrod;
  const double two_pi = 2.0 * std::numbers::pi;
  const auto integrand = [](double x) { return (-1.0 + std::sin(x) * std::sin(x)) * std::exp(-std::cos(x)); };
  double qerr = 0.0;
  const double line = gauss_kronrod<double, 61>::integrate(integrand, 0.0, two_pi, 15, 1e-14, &qerr);
  const double oracle = two_pi * two_pi * line;

  starlab_config* cfg = nullptr;
  double value = NAN;
  if (starlab_config_load(config_path("f_cos").c_str(), &cfg) != STARLAB_OK ||
      starlab_functional(cfg, "F", &value) != STARLAB_OK)
    out.require(false, starlab_last_error());
  starlab_config_free(cfg);
  const double rel = std::abs(value - oracle) / std::abs(oracle);
  out.require(rel < 1e-8, "F = " + fmt("%.15g", value) + " vs " + fmt("%.15g", oracle));
  out.note("F " + fmt("%.12g", value) + ", oracle " + fmt("%.12g", oracle) + ", rel " + fmt("%.2e", rel));
  return out;
}

Outcome thm21() {
  Outcome out;
  const json r = parse(run_report("thm21_warped3", "thm21", out));
  rows_within(r, "thm21.chain", 1e-4, 1, out);
  diagnostics_logged(r, "thm21.displayed", out);
  return out;
}

Outcome prop12() {
  Outcome out;
  const json r = parse(run_report("prop12_warped3", "prop12", out));
  rows_within(r, "prop12.levi_civita#", 1e-6, 20, out);
  diagnostics_logged(r, "prop12.displayed_rhs#", out);
  return out;
}

Outcome prop11() {
  Outcome out;
  const json steady = parse(run_report("prop11_steady", "prop11", out));
  rows_within(steady, "prop11.steady_dt", 1e-12, 1, out);
  rows_within(steady, "prop11.steady_star", 1e-12, 1, out);
  const json general = parse(run_report("prop11_general", "prop11", out));
  rows_within(general, "prop11.derivative", 1e-5, 2, out);
  const json scaling = parse(run_report("prop11_scaling", "prop11", out));
  rows_within(scaling, "prop11.pure_scaling", 1e-8, 2, out);
  return out;
}

Outcome bochner() {
  Outcome out;
  const json r = parse(run_report("bochner", "bochner", out));
  rows_within(r, "bochner.residual#", 1e-7, 50, out);
  return out;
}

Outcome conservation() {
  Outcome out;
  const json r = parse(run_report("conservation_warped3", "conservation", out));
  rows_within(r, "conservation.mass", 1e-6, 1, out);
  rows_within(r, "conservation.literal_box_star", 1e-6, 1, out);
  const json* v = find_row(r, "conservation.literal_violation");
  out.require(v != nullptr, "no literal violation row");
  if (v) {
    const double sup = (*v)["lhs"].is_number() ? (*v)["lhs"].get<double>() : NAN;
    out.require(sup > 1e-3, "literal box* u not measurably nonzero: " + fmt("%.3e", sup));
    out.note("literal sup |box* u| " + fmt("%.4f", sup));
  }
  return out;
}

Outcome thm31() {
  Outcome out;
  const json flat = parse(run_report("thm31_flat_constant", "thm31", out));
  rows_within(flat, "thm31.transport", 1e-4, 1, out);
  rows_within(flat, "thm31.closed_form", 1e-4, 1, out);
  const json warped = parse(run_report("thm31_warped3", "thm31", out));
  rows_within(warped, "thm31.transport", 1e-4, 1, out);
  diagnostics_logged(warped, "thm31.expanded@", out);
  return out;
}

Outcome determinism() {
  Outcome out;
  setenv("STARLAB_THREADS", "1", 1);
  const std::string one = run_report("determinism", "all", out);
  setenv("STARLAB_THREADS", "4", 1);
  const std::string four = run_report("determinism", "all", out);
  unsetenv("STARLAB_THREADS");
  out.require(!one.empty() && one == four, "reports differ between 1 and 4 workers");
  out.note(std::to_string(one.size()) + " bytes compared");
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "curvature identities (warped3)", 10.0, identities},
      {2, "flat stationarity (100 RK4 steps)", 5.0, flat_stationarity},
      {3, "F closed form (flat3, a cos x)", 5.0, f_closed_form},
      {4, "dF/dt chain rule vs FD (warped3)", 60.0, thm21},
      {5, "connection variation (warped3)", 30.0, prop12},
      {6, "self-similar solutions", 30.0, prop11},
      {7, "Bochner residual (50 scenarios)", 60.0, bochner},
      {8, "coupled-system conservation (warped3)", 120.0, conservation},
      {9, "omega transport identity", 120.0, thm31},
      {10, "determinism across worker counts", 120.0, determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  bool all_pass = true;
  for (const auto& c : criteria()) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs < c.budget_s, "runtime over budget");
    std::printf("criterion %d: %s  %s  [%.1f s / %.0f s]  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name, secs,
                c.budget_s, o.detail.c_str());
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
