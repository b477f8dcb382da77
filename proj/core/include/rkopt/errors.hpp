#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include "rkopt/types.hpp"

namespace rkopt {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed structured input. field() names the offending key.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error("parse error in '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Tableau has a coefficient on or above the diagonal.
class ExplicitnessError : public Error {
 public:
  using Error::Error;
};

// Tableau weights do not sum to one.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Request exceeds a hard cap (e.g. tree enumeration order).
class CapacityError : public Error {
 public:
  using Error::Error;
};

// An input lacks a capability the operation needs (derivative order, known optimum).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Non-finite objective output. point() is where it happened.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, Vector point) : Error(what), point_(std::move(point)) {}
  const Vector& point() const noexcept { return point_; }

 private:
  Vector point_;
};

// Runge-Kutta stage produced a non-finite or runaway value.
// stage() is the 0-based stage index; stage() == S refers to the combined update.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int stage) : Error(what), stage_(stage) {}
  int stage() const noexcept { return stage_; }

 private:
  int stage_;
};

// Reference solver failed to converge within its halving budget.
class OracleError : public Error {
 public:
  using Error::Error;
};

// Least-squares order estimate impossible: every error sits at the noise floor.
class IndeterminateOrderError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double grad_norm)
      : Error(what), grad_norm_(grad_norm) {}
  double grad_norm() const noexcept { return grad_norm_; }

 private:
  double grad_norm_;
};

}  // namespace rkopt
