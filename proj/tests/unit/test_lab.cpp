#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "lab/config.hpp"
#include "lab/report.hpp"
#include "lab/suites.hpp"
#include "starlab/errors.hpp"

using namespace starlab;
using namespace starlab::lab;

namespace {

namespace fs = std::filesystem;

bool config_error(const std::string& text) {
  try {
    parse_config(text, ".");
  } catch (const Error& e) {
    return e.kind() == ErrorKind::Config;
  }
  return false;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("starlab_unit_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config defaults and overrides") {
  const auto s = parse_config("[domain]\nN = 16\n[tolerances]\nthm21 = 2e-4\n", ".");
  CHECK(s.id == "inline");
  CHECK(s.N == 16);
  CHECK(s.is_torus());
  CHECK(s.domain.dim == 3);
  CHECK(s.flow.steps() == 100);
  CHECK(s.tolerance("thm21") == 2e-4);
  CHECK(s.tolerance("bochner") == 1e-7);
  REQUIRE(s.checks.transport_t0.size() == 1);
  CHECK(s.checks.transport_t0[0] == doctest::Approx(0.05));
}

TEST_CASE("config rejects inconsistent input") {
  CHECK(config_error("[domain]\nN = 15\n"));
  CHECK(config_error("[domain]\nN = 2\n"));
  CHECK(config_error("[domain]\ndim = 7\n"));
  CHECK(config_error("[flow]\nT = 1.0\ntau0 = 1.0\n"));
  CHECK(config_error("[flow]\ndt = 0.003\nT = 0.1\n"));
  CHECK(config_error("[metric]\npreset = \"hyperbolic\"\n"));
  CHECK(config_error("[metric]\nwarp = 1\n"));
  CHECK(config_error("colour = \"red\"\n"));
  CHECK(config_error("[tolerances]\nmystery = 1e-3\n"));
  CHECK(config_error("[tolerances]\nthm21 = -1.0\n"));
  CHECK(config_error("[phi]\npreset = \"compatible-rot\"\n"));
  CHECK(config_error("[vector]\npreset = \"translation\"\ncomponents = [1.0]\n"));
  CHECK(config_error("[checks]\ntransport_t0 = [0.001]\n"));
  CHECK(config_error("include = \"no-such-preset\"\n"));
  CHECK(config_error("[domain]\nradii = [1.0, 2.0, 1.0]\n[metric]\npreset = \"warped\"\n"));
  CHECK(config_error("not toml at all ["));
}

TEST_CASE("includes resolve presets and local keys win") {
  const auto s = parse_config("include = [\"warped3\", \"rot-phi\"]\n[domain]\nN = 16\n", ".");
  CHECK(s.metric.preset == "warped");
  CHECK(s.phi.preset == "rotation");
  CHECK(s.N == 16);
  CHECK(s.flow.T == doctest::Approx(0.1));

  const fs::path frag = scratch("frag.toml");
  std::ofstream(frag) << "[f]\npreset = \"cos\"\na = 2.0\n";
  const auto t = parse_config("include = \"frag\"\n[f]\na = 3.0\n", frag.parent_path().string());
  CHECK(t.f.preset == "cos");
  CHECK(t.f.a == 3.0);
}

TEST_CASE("suite support depends on the domain") {
  const auto box = parse_config("include = \"gaussian-box\"\n", ".");
  CHECK_THROWS_AS(require_suite_supported(box, "thm31"), Error);
  CHECK_THROWS_AS(require_suite_supported(box, "nonsense"), Error);
  CHECK_NOTHROW(require_suite_supported(box, "prop11"));
}

TEST_CASE("report pass rule") {
  Report r("demo", "s");
  r.check("rel.pass", 1.0 + 5e-7, 1.0, 1e-6, "a");
  r.check("rel.fail", 1.0 + 5e-6, 1.0, 1e-6, "a");
  r.check("abs.pass", 5e-11, 0.0, 1e-10, "a");
  r.check("abs.fail", 5e-9, 0.0, 1e-10, "a");
  r.check("scale.pass", 1e-9, 0.0, 1e-6, "a", 1e-2);
  r.check("nan.fail", NAN, 1.0, 1e-6, "a");
  r.diagnostic("diag", 100.0, 1.0, "a");
  r.error("broken", "a", "OutsideDomain: point outside box");
  const auto& rows = r.rows();
  CHECK(rows[0].status == Status::Pass);
  CHECK(rows[1].status == Status::Fail);
  CHECK(rows[2].status == Status::Pass);
  CHECK(rows[3].status == Status::Fail);
  CHECK(rows[4].status == Status::Pass);
  CHECK(rows[5].status == Status::Fail);
  CHECK(rows[6].status == Status::Diagnostic);
  CHECK(rows[7].status == Status::Fail);
  CHECK_FALSE(r.all_passed());

  Report ok("demo", "s");
  ok.check("x", 1.0, 1.0, 1e-12, "a");
  ok.diagnostic("d", 5.0, 1.0, "a");
  CHECK(ok.all_passed());
}

TEST_CASE("report JSON layout") {
  Report r("demo", "s");
  r.check("a", 2.0, 2.0, 1e-9, "x = x");
  r.diagnostic("b", INFINITY, 1.0, "y");
  const auto j = r.to_json();
  CHECK(j["schema"] == "starlab.report/1");
  CHECK(j["summary"]["rows"] == 2);
  CHECK(j["summary"]["all_passed"] == true);
  CHECK(j["rows"][0]["rule"] == "relative");
  CHECK(j["rows"][1]["rule"] == "none");
  CHECK(j["rows"][1]["tolerance"].is_null());
  CHECK(j["rows"][1]["lhs"].is_null());
  CHECK(r.to_json_text() == r.to_json_text());
}

TEST_CASE("outputs refuse to overwrite without force") {
  const fs::path p = scratch("out.json");
  fs::remove(p);
  write_output(p.string(), "one\n", false);
  try {
    write_output(p.string(), "two\n", false);
    FAIL("expected RefusedOverwrite");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RefusedOverwrite);
  }
  CHECK(slurp(p) == "one\n");
  write_output(p.string(), "two\n", true);
  CHECK(slurp(p) == "two\n");
  CHECK_THROWS_AS(write_output((p.parent_path() / "missing" / "x.json").string(), "z", true), Error);
}

TEST_CASE("identities suite passes on the flat preset") {
  const auto s = parse_config("include = \"flat3\"\n[domain]\nN = 8\n[checks]\npoints = 4\n", ".");
  const auto r = run_suite(s, "identities");
  CHECK(r.all_passed());
  CHECK(r.rows().size() > 10);
}

TEST_CASE("flow CSV has one row per snapshot") {
  const auto s = parse_config("include = \"flat3\"\n[domain]\nN = 8\n[flow]\ndt = 0.01\nT = 0.09\n"
                              "[checks]\ntransport_t0 = [0.04]\n",
                              ".");
  const fs::path csv = scratch("flow.csv");
  const fs::path dumps = scratch("fields");
  fs::remove(csv);
  fs::remove_all(dumps);
  const auto text = run_flow(s, csv.string(), dumps.string(), false);
  std::istringstream in(text);
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10);
  CHECK(text.rfind("t,tau,min_eig_g,int_u_dV,metric_change\n", 0) == 0);
  CHECK(slurp(csv) == text);
  CHECK_THROWS_AS(run_flow(s, csv.string(), "", false), Error);
  CHECK(run_flow(s, csv.string(), "", true) == text);

  const std::string f0 = slurp(dumps / "f_s000000.txt");
  CHECK(f0.rfind("{\"domain\":", 0) == 0);
  int lines = 0;
  for (char c : f0) lines += c == '\n';
  CHECK(lines == 1 + 8 * 8 * 8);
  CHECK(fs::exists(dumps / "g22_s000009.txt"));
}

TEST_CASE("functionals by name") {
  const auto s = parse_config("include = \"flat3\"\n[domain]\nN = 8\n", ".");
  const double two_pi = 2.0 * M_PI;
  CHECK(evaluate_functional(s, "F") == doctest::Approx(-std::pow(two_pi, 3)).epsilon(1e-13));
  // Constant f on a flat torus: u is uniform and omega reduces to f_shift - n.
  const double omega = evaluate_functional(s, "omega");
  const double shift = std::log(std::pow(two_pi, 3) / std::pow(4.0 * M_PI, 1.5));
  CHECK(omega == doctest::Approx(shift - 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(evaluate_functional(s, "W"), Error);
}
