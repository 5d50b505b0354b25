#pragma once

#include <stdexcept>
#include <string>

namespace symplattice {

// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input. `key` names the offending parameter when there is one.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg, std::string key = {})
      : Error(msg), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

// Enumeration or Monte Carlo budget exhausted.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Numerically singular input (Iwasawa, inversion).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// Sampler failed the mean-value calibration gate.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

}  // namespace symplattice
