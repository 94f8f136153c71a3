#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace inertia {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: dimension mismatch, empty sample, unknown id.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configuration violates a documented constraint (e.g. the step-size bound).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Not enough usable data to compute a statistic.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Too many samples had to be discarded for a fit to be meaningful.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

/// A check was asked to run over indices where its preconditions fail.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// No index satisfying the requested property was found within the scan.
class NotFoundError : public Error {
 public:
  NotFoundError(const std::string& what, std::size_t last_violating)
      : Error(what), last_violating_(last_violating) {}

  std::size_t last_violating() const noexcept { return last_violating_; }

 private:
  std::size_t last_violating_;
};

/// A non-finite value appeared while iterating. Carries the iterate that
/// produced it.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, Eigen::VectorXd iterate)
      : Error(what), iterate_(std::move(iterate)) {}

  const Eigen::VectorXd& iterate() const noexcept { return iterate_; }

 private:
  Eigen::VectorXd iterate_;
};

}  // namespace inertia
