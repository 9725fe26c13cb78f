#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relforge {

// Base for all library errors. The CLI maps the concrete type to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed an argument that violates an operation's precondition
// (bad weights, out-of-range probability, invalid configuration, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

enum class DataErrorKind {
  kParse,
  kMissingField,
  kInvalidLabel,
  kDuplicateId,
  kOutOfRange,
  kMalformedPath,
  kContractViolation,
  kIo,
};

const char* to_string(DataErrorKind kind);

// Problems with input data. Carries the 1-based line number when the error
// can be attributed to one line of an input file (0 otherwise).
class DataError : public Error {
 public:
  DataError(DataErrorKind kind, const std::string& message,
            std::size_t line = 0);

  DataErrorKind kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }

 private:
  DataErrorKind kind_;
  std::size_t line_;
};

// Broken internal invariant: shape mismatch, index out of range.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace relforge
