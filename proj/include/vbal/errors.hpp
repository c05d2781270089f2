#pragma once

#include <stdexcept>
#include <string>

namespace vbal {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// A caller broke an operation's documented input contract.
class ContractViolation : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "contract_violation"; }
};

/// Inputs outside the documented domain (norm bounds, sample counts, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

class SingularSystem : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "singular_system"; }
};

class DegenerateFace : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "degenerate_face"; }
};

class NotPsd : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "not_psd"; }
};

/// A constructed object failed its own post-condition check.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numerical"; }
};

/// Restart, attempt or rejection budget ran out.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "budget_exhausted"; }
};

class RejectionExhausted : public BudgetExhausted {
 public:
  using BudgetExhausted::BudgetExhausted;
  const char* kind() const noexcept override { return "rejection_exhausted"; }
};

}  // namespace vbal
