#pragma once

#include <stdexcept>
#include <string>

namespace tdcoop {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Weighted exponential sum whose weights could not be separated.
class DegenerateWeightsError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A cooperating transmitter was scheduled into a zero-length slot.
class DegenerateFractionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values reached a numeric kernel.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Not enough usable points (e.g. zero outage) to fit a slope.
class InsufficientDataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Output destination could not be written.
class OutputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace tdcoop
