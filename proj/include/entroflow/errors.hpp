#pragma once

#include <stdexcept>
#include <string>

namespace entroflow {

// Error taxonomy. The CLI maps each family onto an exit code
// (input -> 2, domain/numerical/degenerate -> 3, size -> 4).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or out-of-contract input (parse errors, non-finite entries,
// not-PSD operators, rejected generators).
class InputError : public Error {
 public:
  using Error::Error;
};

class NotPsdError : public InputError {
 public:
  using InputError::InputError;
};

// Well-formed input outside the mathematical domain of an operation
// (singular arguments, states outside B(sigma), missing invariant states).
class DomainError : public Error {
 public:
  using Error::Error;
};

// All sampled states are invariant: nothing to estimate.
class DegenerateError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace entroflow
