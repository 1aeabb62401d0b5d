#pragma once

#include <stdexcept>
#include <string>

namespace harmonium {

/// Error classes; the CLI maps each category onto its own exit code.
enum class ErrorCategory {
  domain = 3,
  config = 4,
  io = 5,
  data = 6,
  numerical = 7,
  capacity = 8,
  sampler = 9,
  format = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

/// Argument outside a function's mathematical domain (e.g. ln 0).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::domain, what) {}
};

/// Invalid configuration or out-of-range hyperparameter.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

/// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

/// Non-finite values, overflow, or training divergence.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorCategory::numerical, what) {}
};

/// A computation was refused because its cost exceeds a configured limit.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorCategory::capacity, what) {}
};

/// Rejection sampler exceeded its iteration cap.
class SamplerError : public Error {
 public:
  SamplerError(const std::string& what, double alpha, double beta, double t_lower)
      : Error(ErrorCategory::sampler, what), alpha_(alpha), beta_(beta), t_lower_(t_lower) {}

  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double t_lower() const noexcept { return t_lower_; }

 private:
  double alpha_;
  double beta_;
  double t_lower_;
};

/// Archive could not be decoded or has an unsupported version.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorCategory::format, what) {}
};

}  // namespace harmonium
