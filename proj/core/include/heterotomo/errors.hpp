#pragma once

#include <stdexcept>
#include <string>

namespace heterotomo {

/// Argument outside the mathematical domain of an operation (e.g. a chord
/// parameter beyond the half length).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid tuning or size parameter (non-positive ridge, too few nodes, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The observation design cannot support the requested estimator.
class DesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver stopped before reaching its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, int iterations, double relative_residual);

  int iterations() const noexcept { return iterations_; }
  double relative_residual() const noexcept { return relative_residual_; }

 private:
  int iterations_;
  double relative_residual_;
};

/// Invalid run configuration. `key_path()` names the offending entry,
/// e.g. "design.sigma".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key_path, const std::string& message);

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

}  // namespace heterotomo
