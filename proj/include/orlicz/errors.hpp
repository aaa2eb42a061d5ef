#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed potential spec, out-of-range parameter, broken
// config file. CLI maps these to exit code 2.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Malformed potential spec string; remembers where parsing stopped.
struct ParseError : DomainError {
    ParseError(const std::string& msg, std::size_t position)
        : DomainError(msg + " (at position " + std::to_string(position) + ")"),
          pos(position) {}
    std::size_t pos;
};

// Invalid run configuration (sweeps <= 0, empty n list, ...).
struct ConfigError : DomainError {
    explicit ConfigError(const std::string& msg) : DomainError(msg) {}
};

// Numerical failures. CLI maps these to exit code 3.
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
struct QuadratureError : NumericError {
    explicit QuadratureError(const std::string& msg) : NumericError(msg) {}
};

// A root could not be bracketed inside the search range.
struct BracketError : NumericError {
    explicit BracketError(const std::string& msg) : NumericError(msg) {}
};

// An integrand failed its tail-decay test, so the integral is not trusted.
struct IntegrabilityError : NumericError {
    explicit IntegrabilityError(const std::string& msg) : NumericError(msg) {}
};

// A growth/separation hypothesis needed by an algorithm does not hold for
// the supplied pair of potentials (e.g. V1/V2 fails to diverge).
struct HypothesisError : NumericError {
    explicit HypothesisError(const std::string& msg) : NumericError(msg) {}
};

// A constrained optimisation problem has no feasible point (dual unbounded).
struct InfeasibleError : NumericError {
    explicit InfeasibleError(const std::string& msg) : NumericError(msg) {}
};

// An iteration left the region where the problem is well posed (all
// multipliers collapsed to zero, unbounded entropy, ...).
struct DivergenceError : NumericError {
    explicit DivergenceError(const std::string& msg) : NumericError(msg) {}
};

// A splitting stage produced zero hits, so the estimator dies.
struct DegenerateError : NumericError {
    explicit DegenerateError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace orlicz
