#include "starlab/starlab.h"

#include <cmath>
#include <cstring>
#include <exception>
#include <string>

#include "lab/config.hpp"
#include "lab/report.hpp"
#include "lab/suites.hpp"
#include "starlab/errors.hpp"

struct starlab_config {
  starlab::lab::Scenario scenario;
};

struct starlab_report {
  starlab::lab::Report report;
};

namespace {

thread_local std::string last_error;

starlab_status code_for(starlab::ErrorKind kind) {
  using starlab::ErrorKind;
  switch (kind) {
    case ErrorKind::Config: return STARLAB_ERR_CONFIG;
    case ErrorKind::Io: return STARLAB_ERR_IO;
    case ErrorKind::RefusedOverwrite: return STARLAB_ERR_REFUSED_OVERWRITE;
    case ErrorKind::InvalidArgument: return STARLAB_ERR_INVALID_ARGUMENT;
    default: return STARLAB_ERR_RUNTIME;
  }
}

template <class F>
starlab_status guard(F&& body) {
  last_error.clear();
  try {
    body();
    return STARLAB_OK;
  } catch (const starlab::Error& e) {
    last_error = e.what();
    return code_for(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return STARLAB_ERR_RUNTIME;
  } catch (...) {
    last_error = "unknown error";
    return STARLAB_ERR_RUNTIME;
  }
}

starlab_status invalid(const char* what) {
  last_error = std::string("invalid argument: ") + what;
  return STARLAB_ERR_INVALID_ARGUMENT;
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* starlab_version(void) { return starlab::lab::build_version(); }

const char* starlab_last_error(void) { return last_error.c_str(); }

starlab_status starlab_config_load(const char* path, starlab_config** out) {
  if (!path || !out) return invalid("path and out are required");
  *out = nullptr;
  return guard([&] { *out = new starlab_config{starlab::lab::load_config(path)}; });
}

starlab_status starlab_config_parse(const char* toml_text, const char* base_dir, starlab_config** out) {
  if (!toml_text || !out) return invalid("text and out are required");
  *out = nullptr;
  return guard([&] { *out = new starlab_config{starlab::lab::parse_config(toml_text, base_dir ? base_dir : ".")}; });
}

void starlab_config_free(starlab_config* cfg) { delete cfg; }

starlab_status starlab_run_suite(const starlab_config* cfg, const char* suite, starlab_report** out) {
  if (!cfg || !suite || !out) return invalid("config, suite and out are required");
  *out = nullptr;
  return guard([&] { *out = new starlab_report{starlab::lab::run_suite(cfg->scenario, suite)}; });
}

int starlab_report_all_passed(const starlab_report* report) { return report && report->report.all_passed() ? 1 : 0; }

size_t starlab_report_row_count(const starlab_report* report) { return report ? report->report.rows().size() : 0; }

starlab_status starlab_report_row(const starlab_report* report, size_t index, starlab_row* out) {
  if (!report || !out) return invalid("report and out are required");
  if (index >= report->report.rows().size()) return invalid("row index out of range");
  const auto& r = report->report.rows()[index];
  out->check_id = r.check_id.c_str();
  out->lhs = r.lhs;
  out->rhs = r.rhs;
  out->abs_err = r.abs_err;
  out->rel_err = r.rel_err;
  out->tolerance = r.status == starlab::lab::Status::Diagnostic ? NAN : r.tolerance;
  out->status = r.status == starlab::lab::Status::Pass   ? STARLAB_ROW_PASS
                : r.status == starlab::lab::Status::Fail ? STARLAB_ROW_FAIL
                                                         : STARLAB_ROW_DIAGNOSTIC;
  return STARLAB_OK;
}

starlab_status starlab_report_to_json(const starlab_report* report, char** out) {
  if (!report || !out) return invalid("report and out are required");
  *out = nullptr;
  return guard([&] { *out = copy_string(report->report.to_json_text()); });
}

starlab_status starlab_report_write_json(const starlab_report* report, const char* path, int force) {
  if (!report || !path) return invalid("report and path are required");
  return guard([&] { starlab::lab::write_output(path, report->report.to_json_text(), force != 0); });
}

void starlab_report_free(starlab_report* report) { delete report; }

void starlab_string_free(char* s) { delete[] s; }

starlab_status starlab_run_flow(const starlab_config* cfg, const char* csv_path, const char* dump_dir, int force) {
  if (!cfg) return invalid("config is required");
  return guard([&] {
    starlab::lab::run_flow(cfg->scenario, csv_path ? csv_path : "", dump_dir ? dump_dir : "", force != 0);
  });
}

starlab_status starlab_functional(const starlab_config* cfg, const char* which, double* out) {
  if (!cfg || !which || !out) return invalid("config, which and out are required");
  return guard([&] { *out = starlab::lab::evaluate_functional(cfg->scenario, which); });
}

}  // extern "C"
