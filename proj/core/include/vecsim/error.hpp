#pragma once

#include <stdexcept>
#include <string>

namespace vecsim {

// Invalid or inconsistent configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A reference that does not resolve (unknown task, vehicle or server) or a
// structurally broken schedule.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of a model function.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Instance too large for exhaustive enumeration.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

// Caller combined results or options that cannot be used together.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace vecsim
