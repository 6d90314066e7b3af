#pragma once

#include <stdexcept>
#include <string>

namespace vergm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad model/CLI configuration (unknown term, missing attribute, bad schedule).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Unreadable or malformed input file.
class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public IoError {
 public:
  ParseError(const std::string& path, long line, const std::string& what)
      : IoError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class InvalidDyad : public Error {
 public:
  using Error::Error;
};

/// Request exceeds what an exact routine can enumerate.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Optimizer or fixed-point iteration failed to converge.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Simulated statistics carry no information (zero variance, collapsed weights).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Non-finite or non-positive-definite intermediate quantity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace vergm
