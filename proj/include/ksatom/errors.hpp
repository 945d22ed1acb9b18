#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ksatom {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (e.g. preimage of 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point outside the sampled range of a profile.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Not enough samples / points for the requested stencil or fit.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration. `path` names the offending field when known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Inputs that do not agree with each other (sizes, grids, orthonormality).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// A value that must be nonzero is (numerically) zero.
class DegenerateValueError : public Error {
 public:
  using Error::Error;
};

/// Operation called on an object that does not satisfy its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InternalError : public Error {
 public:
  using Error::Error;
};

/// Self-consistent iteration did not converge; carries the residual history.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residual_history() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace ksatom
