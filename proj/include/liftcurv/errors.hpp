#pragma once

#include <stdexcept>
#include <string>

namespace liftcurv {

// Argument outside the domain of a closed-form scalar function or chart.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The lifted metric (or a quantity derived from it) is singular at the point.
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration: bad keys, violated family constraints, bad dimensions.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace liftcurv
