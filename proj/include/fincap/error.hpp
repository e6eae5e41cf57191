#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fincap {

/// Base class for every error raised by the library. The CLI maps the
/// concrete type to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the set where a quantity is defined (e.g. the
/// gradient of a norm at the origin).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public Error {
 public:
  using Error::Error;
};

class CurvatureSingularity : public Error {
 public:
  using Error::Error;
};

class UnsupportedDimension : public Error {
 public:
  using Error::Error;
};

class SolverInconsistency : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedure gave up. Carries whatever diagnostic the caller
/// attached: a residual history for PDE solves, a value bracket for
/// scalar searches.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> history,
                     double lower = 0.0, double upper = 0.0)
      : Error(what), history_(std::move(history)), lower_(lower), upper_(upper) {}

  const std::vector<double>& history() const noexcept { return history_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  std::vector<double> history_;
  double lower_;
  double upper_;
};

}  // namespace fincap
