#pragma once

#include <stdexcept>
#include <string>

namespace ptmem {

/// Element values or rates that violate a type invariant.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A memory-state argument outside its closed domain [0, 1].
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A series too short for the requested observation window.
class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent scenario configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed result file (bad schema version, missing rows, ...).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ptmem
