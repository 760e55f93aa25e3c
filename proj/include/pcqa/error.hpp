#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pcqa {

/// Failure while reading or writing external data (files, tables, headers).
/// The CLI maps every InputError to exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class TruncationError : public InputError {
 public:
  TruncationError(const std::string& unit, std::size_t expected, std::size_t actual)
      : InputError("truncated body: expected " + std::to_string(expected) + " " + unit +
                   ", got " + std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const { return expected_; }
  std::size_t actual() const { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

class ValidationError : public InputError {
 public:
  ValidationError(const std::string& what, std::size_t point)
      : InputError(what + " at point " + std::to_string(point)), point_(point) {}

  std::size_t point() const { return point_; }

 private:
  std::size_t point_;
};

class SchemaError : public InputError {
 public:
  using InputError::InputError;
};

class DuplicateKeyError : public InputError {
 public:
  using InputError::InputError;
};

/// Input is well-formed but outside an operation's domain (empty cloud,
/// missing colors for a color metric, beta > N, ...). CLI exit code 3.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace pcqa
