#pragma once

#include <stdexcept>
#include <string>

namespace qccsim {

// Numeric tolerances shared by every module. Tests pin their thresholds to
// these values, so change them here only.
struct Tolerances {
  static constexpr double structural = 1e-12;  // norms, unitarity, hermiticity
  static constexpr double arithmetic = 1e-14;  // inner products, sums
  static constexpr double orthogonal = 1e-12;  // |<chi|psi>| below this => weak value undefined
  static constexpr double eigen = 1e-10;       // eigen-relations and degeneracy grouping
};

inline constexpr std::size_t kDefaultCapacity = std::size_t{1} << 20;

enum class ErrorKind {
  ConfigParse,
  Validation,
  Capacity,
  Numerical,
};

// Process exit code associated with each error kind.
constexpr int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigParse: return 2;
    case ErrorKind::Validation: return 3;
    case ErrorKind::Capacity: return 4;
    case ErrorKind::Numerical: return 5;
  }
  return 1;
}

constexpr const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigParse: return "config_parse";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Bad argument values, dimension mismatches, unknown labels.
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnknownLabel : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorKind::Capacity, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

// |<chi(t_w)|psi(t_w)>| too small for the weak value to exist.
class OrthogonalPostselection : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NegativeRadicand : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroNorm : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientStatistics : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigParseError : public Error {
 public:
  explicit ConfigParseError(const std::string& what) : Error(ErrorKind::ConfigParse, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

}  // namespace qccsim
