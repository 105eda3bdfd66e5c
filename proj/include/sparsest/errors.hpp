#pragma once

#include <stdexcept>
#include <string>

namespace sparsest {

/// A caller broke a documented precondition (dimension mismatch, bad index,
/// out-of-range parameter).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative kernel ran out of its iteration budget or hit a singular
/// factorization.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The request is well-formed but beyond what an exact routine supports
/// (e.g. face enumeration above the configured dimension cap).
class CapabilityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The selection step found nothing it is allowed to pick.
class SelectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed persisted results or manifests.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A result directory could not be created, written or read.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace sparsest
