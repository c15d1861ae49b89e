#pragma once

#include <stdexcept>
#include <string>

namespace qdvqe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operands disagree on qubit count or vector length.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// Requested object exceeds a fixed size cap (dense matrices, statevectors).
class CapacityError : public Error {
  public:
    using Error::Error;
};

/// Index or coordinate outside its valid domain.
class RangeError : public Error {
  public:
    using Error::Error;
};

/// A documented precondition of an operation was violated.
class ContractViolation : public Error {
  public:
    using Error::Error;
};

class UnsupportedModelError : public Error {
  public:
    using Error::Error;
};

/// Internal bookkeeping went wrong (e.g. a Hamiltonian term that fits no group).
class ConsistencyError : public Error {
  public:
    using Error::Error;
};

/// The non-interacting ground state is not unique at the requested filling.
class DegeneracyError : public Error {
  public:
    using Error::Error;
};

/// An iterative eigensolver ran out of budget.
class ConvergenceError : public Error {
  public:
    using Error::Error;
};

/// The optimizer saw a non-finite objective value.
class OptimizationAborted : public Error {
  public:
    using Error::Error;
};

/// Invalid experiment configuration. Carries the offending line when known.
class ConfigError : public Error {
  public:
    ConfigError(const std::string& what, int line = -1)
        : Error(line >= 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

  private:
    int line_;
};

}  // namespace qdvqe
