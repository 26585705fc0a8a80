#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace starlab::lab {

enum class Status { Pass, Fail, Diagnostic };
const char* to_string(Status s);

// Below this reference magnitude a row is judged on abs_err instead of rel_err.
inline constexpr double kNearZero = 1e-10;

struct Row {
  std::string check_id;
  std::string scenario_id;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double reference = 0.0;  // max(|rhs|, scale) used for rel_err
  double tolerance = 0.0;
  Status status = Status::Diagnostic;
  std::string anchor;
  std::string note;
};

class Report {
 public:
  Report() = default;
  Report(std::string suite, std::string scenario) : suite_(std::move(suite)), scenario_(std::move(scenario)) {}

  // Asserted row: abs_err = |lhs - rhs|, reference = max(|rhs|, scale).
  void check(const std::string& id, double lhs, double rhs, double tolerance, const std::string& anchor,
             double scale = 0.0);
  // Asserted row with a precomputed error (tensor comparisons).
  void check_error(const std::string& id, double lhs, double rhs, double abs_err, double reference,
                   double tolerance, const std::string& anchor);
  void diagnostic(const std::string& id, double lhs, double rhs, const std::string& anchor, double scale = 0.0);
  void diagnostic_error(const std::string& id, double lhs, double rhs, double abs_err, double reference,
                        const std::string& anchor);
  // A check that could not be evaluated: failed row carrying the error text.
  void error(const std::string& id, const std::string& anchor, const std::string& message);

  void set_environment(nlohmann::ordered_json env) { environment_ = std::move(env); }
  void append(const Report& other);

  const std::vector<Row>& rows() const { return rows_; }
  const std::string& suite() const { return suite_; }
  const std::string& scenario() const { return scenario_; }
  bool all_passed() const;

  nlohmann::ordered_json to_json() const;
  std::string to_json_text() const;

 private:
  Row& add(const std::string& id, double lhs, double rhs, double abs_err, double reference, const std::string& anchor);

  std::string suite_;
  std::string scenario_;
  nlohmann::ordered_json environment_ = nlohmann::ordered_json::object();
  std::vector<Row> rows_;
};

// Writes `content` to `path`: RefusedOverwrite when it exists and !force, Io on failure.
void write_output(const std::string& path, const std::string& content, bool force);

}  // namespace starlab::lab
