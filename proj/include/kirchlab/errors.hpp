#pragma once

#include <stdexcept>
#include <string>

namespace kirchlab {

/// Invalid configuration or hypothesis violation detected before any solve.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Field/grid size mismatch.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Evaluation outside the mathematical domain (e.g. y <= 0 in the branch equation).
struct DomainError : std::domain_error {
    explicit DomainError(const std::string& msg) : std::domain_error(msg) {}
};

/// Iterative solver hit its cap. Carries the last relative residual.
struct ConvergenceError : std::runtime_error {
    double residual;
    ConvergenceError(const std::string& msg, double res)
        : std::runtime_error(msg + " (residual " + std::to_string(res) + ")"), residual(res) {}
};

/// Shooting or root bracketing could not establish a sign change.
struct BracketError : std::runtime_error {
    explicit BracketError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Two routes that must agree disagreed (e.g. predicted vs found root count).
struct InconsistencyError : std::runtime_error {
    explicit InconsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace kirchlab
