#pragma once

#include <stdexcept>
#include <string>

namespace wateralign {

/// Invalid configuration or input document. Maps to the CLI's parse exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Any failure of the numerics: classification, leakage, integration, convergence.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ClassificationError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Para/ortho coupling detected in a matrix that must be block diagonal.
class LeakageError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The fixed-step kick integrator lost norm; raise the step count.
class IntegrationError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace wateralign
