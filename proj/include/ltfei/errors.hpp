#pragma once

#include <stdexcept>
#include <string>

namespace ltfei {

/// Raised for malformed inputs and broken preconditions (CLI exit code 1).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A truth-table or enumeration request exceeds the configured arity budget.
class ArityError : public ValidationError {
 public:
  explicit ArityError(const std::string& what) : ValidationError(what) {}
};

/// File or stream failures (CLI exit code 3).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical routine failed to reach its accuracy target.
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace detail
}  // namespace ltfei
