#pragma once

#include <stdexcept>
#include <string>

namespace ifx {

/// Base class for all data-level failures (bad input files, degenerate
/// numerical problems). The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text input. Carries the 1-based line number when known.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value parsed fine but breaks a domain invariant.
class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

/// Numerical failure: singular matrices, optimizer non-convergence.
class NumericalError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace ifx
