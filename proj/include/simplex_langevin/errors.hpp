#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace simplex_langevin {

/// Bad dimensions, out-of-range parameters, unknown identifiers.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coordinate fell below the positivity floor where the Christoffel drift
/// needs 1/x_i.
class DegeneratePoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The raw vector handed to a retraction has nonpositive mass.
class RetractionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic MWU step whose numerator or denominator went nonpositive.
class StepSizeTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A stochastic step could not produce a valid point after resampling.
/// Carries the iteration (once known to the driver) and the simplex block.
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, std::optional<std::size_t> iteration,
              std::optional<std::size_t> block)
      : std::runtime_error(what), iteration_(iteration), block_(block) {}

  std::optional<std::size_t> iteration() const { return iteration_; }
  std::optional<std::size_t> block() const { return block_; }

 private:
  std::optional<std::size_t> iteration_;
  std::optional<std::size_t> block_;
};

/// Malformed input file; `line` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace simplex_langevin
