#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace legdamp {

/// Input outside the domain of a geometric map (e.g. a knee angle outside (0, pi)).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The knee Jacobian vanished (fully folded or fully stretched leg).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A parameter violated its type invariant. `field()` names the offending key.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed input file. Line numbers are 1-based; 0 means "whole file".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : std::runtime_error(source + (line ? ":" + std::to_string(line) : std::string{}) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The stance integration could not proceed (non-finite state, step underflow, time limit).
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Calibration bracket does not straddle the target, or bisection ran out of iterations.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Measured-data processing failed (no threshold crossing, no lift-off, too few points...).
class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace legdamp
