#pragma once

#include <stdexcept>
#include <string>

namespace psomle {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (mismatched dimensions, index out of range).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid optimizer / workflow configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Unknown name in a registry (datasets, objectives).
class LookupError : public Error {
 public:
  using Error::Error;
};

/// Malformed CSV or JSON input. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Persisted file written with a different schema version.
class IncompatibleVersion : public Error {
 public:
  IncompatibleVersion(int found, int expected)
      : Error("schema_version " + std::to_string(found) + " is not supported (expected " +
              std::to_string(expected) + ")"),
        found_(found) {}
  int found() const { return found_; }

 private:
  int found_;
};

/// Not enough runs to classify a recast sequence.
class InsufficientEvidence : public Error {
 public:
  using Error::Error;
};

}  // namespace psomle
