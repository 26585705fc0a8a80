#include "lab/report.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "starlab/errors.hpp"

namespace starlab::lab {

using json = nlohmann::ordered_json;

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Diagnostic: return "diagnostic";
  }
  return "?";
}

Row& Report::add(const std::string& id, double lhs, double rhs, double abs_err, double reference,
                 const std::string& anchor) {
  Row r;
  r.check_id = id;
  r.scenario_id = scenario_;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_err = abs_err;
  r.reference = reference;
  r.rel_err = reference > 0.0 ? abs_err / reference : (abs_err == 0.0 ? 0.0 : INFINITY);
  r.anchor = anchor;
  rows_.push_back(std::move(r));
  return rows_.back();
}

void Report::check_error(const std::string& id, double lhs, double rhs, double abs_err, double reference,
                         double tolerance, const std::string& anchor) {
  Row& r = add(id, lhs, rhs, abs_err, reference, anchor);
  r.tolerance = tolerance;
  const double err = reference < kNearZero ? abs_err : r.rel_err;
  r.status = err <= tolerance ? Status::Pass : Status::Fail;  // NaN fails
}

void Report::check(const std::string& id, double lhs, double rhs, double tolerance, const std::string& anchor,
                   double scale) {
  check_error(id, lhs, rhs, std::abs(lhs - rhs), std::max(std::abs(rhs), scale), tolerance, anchor);
}

void Report::diagnostic_error(const std::string& id, double lhs, double rhs, double abs_err, double reference,
                              const std::string& anchor) {
  add(id, lhs, rhs, abs_err, reference, anchor).status = Status::Diagnostic;
}

void Report::diagnostic(const std::string& id, double lhs, double rhs, const std::string& anchor, double scale) {
  diagnostic_error(id, lhs, rhs, std::abs(lhs - rhs), std::max(std::abs(rhs), scale), anchor);
}

void Report::error(const std::string& id, const std::string& anchor, const std::string& message) {
  Row& r = add(id, NAN, NAN, NAN, NAN, anchor);
  r.status = Status::Fail;
  r.note = message;
}

void Report::append(const Report& other) {
  for (const auto& r : other.rows_) rows_.push_back(r);
}

bool Report::all_passed() const {
  for (const auto& r : rows_)
    if (r.status == Status::Fail) return false;
  return true;
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json Report::to_json() const {
  std::size_t pass = 0, failed = 0, diag = 0;
  json rows = json::array();
  for (const auto& r : rows_) {
    (r.status == Status::Pass ? pass : r.status == Status::Fail ? failed : diag)++;
    json o;
    o["check_id"] = r.check_id;
    o["scenario_id"] = r.scenario_id;
    o["lhs"] = number(r.lhs);
    o["rhs"] = number(r.rhs);
    o["abs_err"] = number(r.abs_err);
    o["rel_err"] = number(r.rel_err);
    o["rule"] = r.status == Status::Diagnostic ? "none" : (r.reference < kNearZero ? "absolute" : "relative");
    o["tolerance"] = r.status == Status::Diagnostic ? json(nullptr) : number(r.tolerance);
    o["status"] = to_string(r.status);
    o["anchor"] = r.anchor;
    if (!r.note.empty()) o["note"] = r.note;
    rows.push_back(std::move(o));
  }
  json doc;
  doc["schema"] = "starlab.report/1";
  doc["suite"] = suite_;
  doc["scenario"] = scenario_;
  doc["environment"] = environment_;
  doc["summary"] = {{"rows", rows_.size()},
                    {"passed", pass},
                    {"failed", failed},
                    {"diagnostic", diag},
                    {"all_passed", failed == 0}};
  doc["rows"] = std::move(rows);
  return doc;
}

std::string Report::to_json_text() const { return to_json().dump(2) + "\n"; }

void write_output(const std::string& path, const std::string& content, bool force) {
  namespace fs = std::filesystem;
  if (path.empty()) fail(ErrorKind::Io, "empty output path");
  std::error_code ec;
  if (fs::exists(path, ec) && !force) fail(ErrorKind::RefusedOverwrite, path + " exists (use --force)");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) fail(ErrorKind::Io, "write to " + path + " failed");
}

}  // namespace starlab::lab
