#include "heterotomo/errors.hpp"

namespace heterotomo {

ConvergenceError::ConvergenceError(const std::string& what, int iterations,
                                   double relative_residual)
    : std::runtime_error(what + " (iterations=" + std::to_string(iterations) +
                         ", relative residual=" + std::to_string(relative_residual) + ")"),
      iterations_(iterations),
      relative_residual_(relative_residual) {}

ConfigError::ConfigError(std::string key_path, const std::string& message)
    : std::runtime_error(key_path + ": " + message), key_path_(std::move(key_path)) {}

}  // namespace heterotomo
