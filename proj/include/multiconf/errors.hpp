#pragma once

#include <stdexcept>
#include <string>

namespace multiconf {

// Each error maps onto a CLI exit code: config -> 2, precondition -> 3,
// everything else that escapes a suite is a verification failure.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IndexError : Error {
  using Error::Error;
};

struct StructuralError : Error {
  using Error::Error;
};

struct DomainError : Error {
  using Error::Error;
};

struct SingularMetricError : Error {
  long long node;
  SingularMetricError(long long n, const std::string& what) : Error(what), node(n) {}
};

struct NumericalError : Error {
  double residual;
  NumericalError(const std::string& what, double r) : Error(what), residual(r) {}
};

struct PreconditionError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace multiconf
