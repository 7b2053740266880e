#pragma once

#include <stdexcept>
#include <string>

namespace lrsim {

struct InvalidDimension : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct InvalidParameter : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the domain [-1, 1] of the link functions.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Bad or missing configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lrsim
