#pragma once

#include <stdexcept>
#include <string>

namespace starlab {

enum class ErrorKind {
  NonPositiveDefinite,
  ShapeMismatch,
  Unsupported,
  OutsideDomain,
  PositivityLost,
  StepRejected,
  NotNormalized,
  WindowError,
  Config,
  Io,
  RefusedOverwrite,
  InvalidArgument,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace starlab
