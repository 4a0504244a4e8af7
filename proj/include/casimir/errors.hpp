#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Argument outside the mathematical domain of an operation (negative energy,
// non-positive separation, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Malformed input data: CSV tables, JSON configs, parameter ranges.
class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Numerical procedure failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_; }

private:
  double achieved_;
};

// Too few inputs for the requested fit or regression.
class ArityError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Parabolic force-vs-voltage fit without attractive curvature.
class CalibrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Singular normal equations in a linear least-squares fit.
class RankError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Perturbative expansion used outside its validity range (d <= 5 delta).
class RegimeError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// A data point that does not fall into any bin.
class AssignmentError : public std::out_of_range {
public:
  using std::out_of_range::out_of_range;
};

}  // namespace casimir
