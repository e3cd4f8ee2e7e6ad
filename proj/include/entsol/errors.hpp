#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace entsol {

// Base class for every error thrown by the library. The `code()` string is a
// stable machine-readable tag (it is what the C API and the CLI map to error
// records), while what() carries the human-readable message.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// --- expression engine -------------------------------------------------

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& message, std::size_t byte_offset)
        : Error("SyntaxError", message + " (at byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

    std::size_t byte_offset() const noexcept { return offset_; }

protected:
    SyntaxError(std::string code, const std::string& message, std::size_t byte_offset)
        : Error(std::move(code), message + " (at byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}

private:
    std::size_t offset_;
};

class UnknownFunctionError : public SyntaxError {
public:
    UnknownFunctionError(const std::string& name, std::size_t byte_offset)
        : SyntaxError("UnknownFunction", "unknown function '" + name + "'", byte_offset) {}
};

class UnboundVariableError : public Error {
public:
    explicit UnboundVariableError(const std::string& name)
        : Error("UnboundVariable", "variable '" + name + "' is not bound in the environment") {}
};

class DivisionByZeroError : public Error {
public:
    DivisionByZeroError() : Error("DivisionByZero", "division by zero during evaluation") {}
};

// --- grids --------------------------------------------------------------

class NonConformingSpacingError : public Error {
public:
    NonConformingSpacingError(double L, double h)
        : Error("NonConformingSpacing",
                "2L/h must be an integer >= 2 (L=" + std::to_string(L) +
                ", h=" + std::to_string(h) + ")") {}
};

class WindowNotNestedError : public Error {
public:
    explicit WindowNotNestedError(const std::string& message)
        : Error("WindowNotNested", message) {}
};

// --- problems -----------------------------------------------------------

class UnknownPresetError : public Error {
public:
    explicit UnknownPresetError(const std::string& name)
        : Error("UnknownPreset", "unknown preset '" + name + "'") {}
};

class ProblemFileError : public Error {
public:
    ProblemFileError(const std::string& message, int line)
        : Error("ProblemFileError", message + " (line " + std::to_string(line) + ")"),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

// --- solvers ------------------------------------------------------------

class SolveError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public SolveError {
public:
    SingularSystemError() : SolveError("SingularSystem", "linear system is singular") {}
};

class NewtonStalledError : public SolveError {
public:
    NewtonStalledError(int iteration, double residual_sup)
        : SolveError("NewtonStalled",
                     "Newton damping exhausted at iteration " + std::to_string(iteration) +
                     " (sup-residual " + std::to_string(residual_sup) + ")") {}
};

class MaxIterationsError : public SolveError {
public:
    MaxIterationsError(int iterations, double residual_sup)
        : SolveError("MaxIterations",
                     "no convergence after " + std::to_string(iterations) +
                     " iterations (sup-residual " + std::to_string(residual_sup) + ")") {}
};

class ContinuationFailedError : public SolveError {
public:
    ContinuationFailedError(double lambda_reached)
        : SolveError("ContinuationFailed",
                     "continuation step size underflow at lambda = " +
                     std::to_string(lambda_reached)) {}
};

class LineSearchStalledError : public SolveError {
public:
    LineSearchStalledError(int iteration)
        : SolveError("LineSearchStalled",
                     "backtracking line search stalled at iteration " +
                     std::to_string(iteration)) {}
};

class CgNoConvergenceError : public SolveError {
public:
    CgNoConvergenceError(int iterations, double rel_residual)
        : SolveError("CGNoConvergence",
                     "conjugate gradient did not converge in " + std::to_string(iterations) +
                     " iterations (relative residual " + std::to_string(rel_residual) + ")") {}
};

class MarginTooLargeError : public Error {
public:
    explicit MarginTooLargeError(double L)
        : Error("MarginTooLarge",
                "interior-bound margins require L > 2 (got L=" + std::to_string(L) + ")") {}
};

// --- configuration ------------------------------------------------------

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("ConfigError", message) {}
};

}  // namespace entsol
