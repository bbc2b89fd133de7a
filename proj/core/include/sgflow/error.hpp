#pragma once

#include <stdexcept>
#include <cstddef>
#include <string>
#include <utility>

namespace sgflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different grids or carry incompatible degrees.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A metric failed the positive-definiteness check at some grid point.
class DegenerateMetricError : public Error {
 public:
  DegenerateMetricError(const std::string& what, std::size_t point)
      : Error(what), point_(point) {}
  std::size_t point() const noexcept { return point_; }

 private:
  std::size_t point_;
};

/// A right-hand side or state produced NaN/Inf.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

class CflViolation : public Error {
 public:
  using Error::Error;
};

/// Config schema or semantic validation failure. `path` is a JSON pointer.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class SingularJacobianError : public ConvergenceError {
 public:
  using ConvergenceError::ConvergenceError;
};

/// dA differs from F beyond tolerance when evaluating the Chern-Simons term.
class PotentialMismatchError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace sgflow
