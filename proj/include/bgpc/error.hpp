#pragma once

#include <stdexcept>
#include <string>

namespace bgpc {

/// Malformed or inconsistent input (dimension mismatch, non-finite entries,
/// bad JSON field, violated sample-count hypothesis).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

class DimensionError : public InputError {
 public:
  explicit DimensionError(const std::string& what) : InputError(what) {}
};

/// The request is well formed but outside the regime the certificate handles
/// (e.g. a single snapshot, where no D block exists).
class UnsupportedError : public InputError {
 public:
  explicit UnsupportedError(const std::string& what) : InputError(what) {}
};

/// Refusals that are not input mistakes: enumeration budget exceeded, or a
/// construction whose counting inequality fails.
class RefusalError : public std::runtime_error {
 public:
  explicit RefusalError(const std::string& what) : std::runtime_error(what) {}
};

class BudgetError : public RefusalError {
 public:
  explicit BudgetError(const std::string& what) : RefusalError(what) {}
};

class InfeasibleError : public RefusalError {
 public:
  explicit InfeasibleError(const std::string& what) : RefusalError(what) {}
};

/// Measurements admit no exact solution at the working tolerance.
class InconsistentError : public std::runtime_error {
 public:
  explicit InconsistentError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bgpc
