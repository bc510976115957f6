#pragma once

#include <stdexcept>
#include <string>

namespace heatsup {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigurationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// Raised when a series cannot reach the requested tolerance within the allowed
/// number of terms; carries the bound actually achieved.
struct TruncationError : std::runtime_error {
  TruncationError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_bound(achieved) {}
  double achieved_bound;
};

}  // namespace heatsup
