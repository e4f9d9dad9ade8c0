#pragma once

#include <stdexcept>
#include <string>

namespace scp {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  SingularGram,
  DegenerateDesign,
  InvalidPenalty,
  EmptyPath,
  AllUnbounded,
  ParseError,
  MissingResponse,
  NonNumericCell,
  Io,
};

// Every error message starts with the name of the stage that raised it,
// e.g. "lars_lasso_path: ...".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

// Coarse grouping used by the C API and the CLI exit codes.
enum class ErrorClass { Usage, Data, Numerical };
ErrorClass classify(ErrorKind kind) noexcept;

}  // namespace scp
