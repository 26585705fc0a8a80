#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "starlab/starlab.h"

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

int exit_for(starlab_status st) {
  switch (st) {
    case STARLAB_OK: return kPass;
    case STARLAB_ERR_CONFIG:
    case STARLAB_ERR_INVALID_ARGUMENT: return kConfigError;
    default: return kRuntimeError;
  }
}

int report_error(starlab_status st) {
  std::fprintf(stderr, "starlab: %s\n", starlab_last_error());
  return exit_for(st);
}

// Owns a loaded config for the lifetime of one command.
struct Config {
  starlab_config* handle = nullptr;
  ~Config() { starlab_config_free(handle); }
};

int verify(const std::string& suite, const std::string& config, const std::string& out, bool force) {
  Config cfg;
  if (auto st = starlab_config_load(config.c_str(), &cfg.handle); st != STARLAB_OK) return report_error(st);
  starlab_report* report = nullptr;
  if (auto st = starlab_run_suite(cfg.handle, suite.c_str(), &report); st != STARLAB_OK) return report_error(st);
  int code = starlab_report_all_passed(report) ? kPass : kCheckFailed;
  starlab_status st = STARLAB_OK;
  if (out.empty()) {
    char* text = nullptr;
    st = starlab_report_to_json(report, &text);
    if (st == STARLAB_OK) std::fputs(text, stdout);
    starlab_string_free(text);
  } else {
    st = starlab_report_write_json(report, out.c_str(), force ? 1 : 0);
  }
  if (st != STARLAB_OK) code = report_error(st);

  std::size_t failed = 0, diagnostic = 0;
  const std::size_t rows = starlab_report_row_count(report);
  for (std::size_t i = 0; i < rows; ++i) {
    starlab_row row;
    starlab_report_row(report, i, &row);
    if (row.status == STARLAB_ROW_FAIL) {
      ++failed;
      std::fprintf(stderr, "FAIL %s abs_err=%.3e rel_err=%.3e tol=%.1e\n", row.check_id, row.abs_err, row.rel_err,
                   row.tolerance);
    }
    if (row.status == STARLAB_ROW_DIAGNOSTIC) ++diagnostic;
  }
  std::fprintf(stderr, "%s: %zu rows, %zu failed, %zu diagnostic\n", suite.c_str(), rows, failed, diagnostic);
  starlab_report_free(report);
  return code;
}

int flow(const std::string& config, const std::string& out, const std::string& dump_dir, bool force) {
  Config cfg;
  if (auto st = starlab_config_load(config.c_str(), &cfg.handle); st != STARLAB_OK) return report_error(st);
  const auto st = starlab_run_flow(cfg.handle, out.c_str(), dump_dir.empty() ? nullptr : dump_dir.c_str(), force);
  return st == STARLAB_OK ? kPass : report_error(st);
}

int functional(const std::string& which, const std::string& config) {
  Config cfg;
  if (auto st = starlab_config_load(config.c_str(), &cfg.handle); st != STARLAB_OK) return report_error(st);
  double value = 0.0;
  if (auto st = starlab_functional(cfg.handle, which.c_str(), &value); st != STARLAB_OK) return report_error(st);
  std::printf("%.17g\n", value);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"starlab: star-Ricci flow lab"};
  app.set_version_flag("--version", std::string(starlab_version()));
  app.require_subcommand(1);

  std::string suite, config, out, dump_dir, which;
  bool force = false;

  auto* v = app.add_subcommand("verify", "run a verification suite and emit a JSON report");
  v->add_option("--suite", suite, "identities|prop11|prop12|thm21|thm31|bochner|conservation|all")->required();
  v->add_option("--config", config, "scenario TOML")->required();
  v->add_option("--out", out, "report path (stdout when omitted)");
  v->add_flag("--force", force, "overwrite an existing output");

  auto* f = app.add_subcommand("flow", "integrate the coupled system and write a CSV series");
  f->add_option("--config", config, "scenario TOML")->required();
  f->add_option("--out", out, "CSV path")->required();
  f->add_option("--dump-fields", dump_dir, "directory for field snapshots");
  f->add_flag("--force", force, "overwrite existing outputs");

  auto* q = app.add_subcommand("functional", "evaluate F or omega at t = 0");
  q->add_option("--which", which, "F or omega")->required()->check(CLI::IsMember({"F", "omega"}));
  q->add_option("--config", config, "scenario TOML")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (v->parsed()) return verify(suite, config, out, force);
  if (f->parsed()) return flow(config, out, dump_dir, force);
  return functional(which, config);
}
