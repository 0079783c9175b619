#pragma once

#include <stdexcept>
#include <string>

namespace f2erg {

// Infrastructure failures: the computation could not be carried out as
// requested (enumeration too large, lazy lookahead ran past its bound).
class InfraError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapExceeded : public InfraError {
 public:
  using InfraError::InfraError;
};

class LookaheadExceeded : public InfraError {
 public:
  using InfraError::InfraError;
};

// Exact cylinder pushing would touch the boundary; switch to sampling.
class BoundaryContact : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace f2erg
