#pragma once

#include <stdexcept>
#include <string>

namespace nlqm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments was violated (dimension mismatch, bad range).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// The input is well-formed but degenerate for the requested quantity (e.g. N = 0).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A solution specification failed one of its constraints.
class ValidationError : public Error {
 public:
  ValidationError(std::string constraint, double residual, const std::string& detail)
      : Error(constraint + " violated (residual " + std::to_string(residual) + "): " + detail),
        constraint_(std::move(constraint)),
        residual_(residual) {}

  const std::string& constraint() const noexcept { return constraint_; }
  double residual() const noexcept { return residual_; }

 private:
  std::string constraint_;
  double residual_;
};

/// Numerical time integration could not continue.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(const std::string& what, double last_good_time)
      : Error(what + " (last good time " + std::to_string(last_good_time) + ")"),
        last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// The requested time lies outside the interval on which a closed form exists.
class ExistenceWindowError : public Error {
 public:
  using Error::Error;
};

/// The operation does not apply to this parameter regime; another one does.
class WrongCaseError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlqm
