#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rulefoil {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed values, broken invariants, unknown identifiers.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Append would break the non-decreasing timestamp order of a log.
class OrderingError : public Error {
 public:
  using Error::Error;
};

// I/O failure while persisting or loading a log.
class StorageError : public Error {
 public:
  using Error::Error;
};

// A stored reference points at something that does not exist.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

// An API precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Foil prediction has no rule to choose from.
class NoCandidateError : public Error {
 public:
  using Error::Error;
};

// Unparseable input file; carries the 1-based line/column of the failure.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(message + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace rulefoil
