#pragma once

#include <stdexcept>
#include <string>

namespace essk {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter vector or a distribution argument lies outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input that cannot support the requested computation (e.g. a constant
// predictor handed to the spline basis).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A variance ratio that implies a non-positive effective sample size.
class NonInformativeRatio : public Error {
 public:
  using Error::Error;
};

// An estimator could not produce any usable component.
class EstimatorError : public Error {
 public:
  using Error::Error;
};

// Malformed or invalid run configuration. The message is prefixed with the
// JSON path of the offending value.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace essk
