#pragma once

#include <stdexcept>
#include <string>

namespace segbeam {

// Caller broke a documented precondition (dimension mismatch, bad parameter).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite values or a failed factorization surfaced mid-computation.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// A system that must be positive definite turned out numerically singular.
class SingularityError : public NumericError {
 public:
  explicit SingularityError(const std::string& msg) : NumericError(msg) {}
};

// Experiment or scenario configuration is invalid.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Result files could not be written.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace segbeam
