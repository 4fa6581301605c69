#pragma once

#include <stdexcept>
#include <string>

namespace dynkin {

/// Input outside the domain an operation is defined on (bad interval, point
/// outside the computational window, sigma vanishing at an interior point...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// A truncated improper integral whose refinement sequence neither stabilises
/// nor diverges cleanly within the iteration budget.
struct NonConvergentIntegral : std::runtime_error {
    explicit NonConvergentIntegral(const std::string& what) : std::runtime_error(what) {}
};

/// Refinement sequence for an improper integral grows without bound.
struct IntegralDivergence : std::runtime_error {
    explicit IntegralDivergence(const std::string& what) : std::runtime_error(what) {}
};

/// ODE/endpoint refinement failed to stabilise, or a solver hit its budget.
struct SolveFailure : std::runtime_error {
    explicit SolveFailure(const std::string& what) : std::runtime_error(what) {}
};

/// No sign change found within the bracket expansion budget.
struct BracketFailure : std::runtime_error {
    explicit BracketFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A required tangency point does not exist for the given data.
struct NoTangent : std::runtime_error {
    explicit NoTangent(const std::string& what) : std::runtime_error(what) {}
};

/// A result was requested under a regime that does not match the game data.
struct RegimeMismatch : std::runtime_error {
    explicit RegimeMismatch(const std::string& what) : std::runtime_error(what) {}
};

/// The assumption report matches none of the supported solution routes.
struct NoRegimeApplies : std::runtime_error {
    explicit NoRegimeApplies(const std::string& what) : std::runtime_error(what) {}
};

/// Expression text failed to parse; `column` is 1-based within the line.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t column_)
        : std::runtime_error(what), column(column_) {}
    std::size_t column;
};

/// Expression evaluated outside its domain (log of a non-positive number...).
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

/// Config file is syntactically malformed; position is 1-based.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, std::size_t line_, std::size_t column_)
        : std::runtime_error(what), line(line_), column(column_) {}
    std::size_t line;
    std::size_t column;
};

/// Config parsed but describes an unusable game (missing cost, bad interval...).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dynkin
