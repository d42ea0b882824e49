#pragma once

#include <stdexcept>
#include <string>

namespace encl {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct UnsupportedGeometryError : std::runtime_error {
  explicit UnsupportedGeometryError(const std::string& what)
      : std::runtime_error(what) {}
};

struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& what)
      : std::runtime_error(what) {}
};

struct SignInconsistencyError : std::runtime_error {
  explicit SignInconsistencyError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace encl
