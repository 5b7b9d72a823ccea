#pragma once

#include <stdexcept>
#include <string>

namespace pickands {

/// Violated precondition of an operation (bad arguments, mismatched grids).
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain of a function (table range, Laplace exponent).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// A configuration that cannot be simulated, e.g. a covariance that stays
/// indefinite after jitter.
struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedSpecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Exponential-moment requirement of the Levy estimator routes not met.
struct MomentConditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pickands
