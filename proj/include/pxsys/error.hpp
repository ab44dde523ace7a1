#pragma once

#include <stdexcept>
#include <string>

namespace pxsys {

/// Invalid grid, solver or run configuration.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A structural hypothesis on the exponents or nonlinearities is violated.
class HypothesisError : public std::runtime_error {
public:
  HypothesisError(std::string condition, const std::string& what)
      : std::runtime_error(condition + ": " + what), condition_(std::move(condition)) {}

  const std::string& condition() const noexcept { return condition_; }

private:
  std::string condition_;
};

/// Evaluation outside the domain of a nonlinearity (non-positive argument).
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A nonlinear solve or an outer iteration failed to converge.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace pxsys
