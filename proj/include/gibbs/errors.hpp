#pragma once

#include <stdexcept>
#include <string>

namespace gibbs {

/// Malformed user input: bad parameters, schema violations, unknown ids.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold for its input.
class PreconditionError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A numerical procedure failed (drift check, acceptance collapse, divergence).
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gibbs
