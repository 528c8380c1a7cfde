#pragma once

#include <stdexcept>
#include <string>

namespace uqprop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a precondition: bad dimensions, invalid parameters,
/// malformed input files. The CLI maps these to exit code 2.
class ContractError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ContractError {
 public:
  DimensionMismatch(const std::string& what, long expected, long actual);

  long expected() const noexcept { return expected_; }
  long actual() const noexcept { return actual_; }

 private:
  long expected_;
  long actual_;
};

/// The requested combination is well-formed but not supported, e.g. a
/// credible interval for a non-Gaussian output.
class UnsupportedError : public ContractError {
 public:
  using ContractError::ContractError;
};

/// A numerical procedure failed. The CLI maps these to exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, long rank, long expected_rank);

  long rank() const noexcept { return rank_; }

 private:
  long rank_;
};

/// Cholesky (or square-root) factorization failed after the jitter retry.
class FactorizationError : public NumericalError {
 public:
  FactorizationError(const std::string& what, double attempted_jitter);

  double attempted_jitter() const noexcept { return jitter_; }

 private:
  double jitter_;
};

/// A computed quantity violated an invariant by more than rounding allows
/// (for instance a clearly negative propagated variance).
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The quadrature reference did not converge within its budget.
class OracleFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace uqprop
