#pragma once

#include <stdexcept>
#include <string>

namespace avc {

// Every failure surfaced by the library derives from Error. The category
// decides the CLI exit code (see exit_code()).
enum class ErrorCategory { kConfig, kNumerical, kIo };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::kConfig, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::kIo, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ErrorCategory::kNumerical, what) {}
};

/// Fewer than m+1 points inside the tangent ball.
class InsufficientNeighbors : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The two smallest singular values coincide, so the normal is not identifiable.
class DegenerateNeighborhood : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyAnnulus : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConvergenceFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OptimizationFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

inline int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kConfig:
      return 2;
    case ErrorCategory::kNumerical:
      return 3;
    case ErrorCategory::kIo:
      return 4;
  }
  return 1;
}

}  // namespace avc
