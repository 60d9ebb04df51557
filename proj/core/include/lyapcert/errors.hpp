#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lyapcert {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax or identifier error while parsing an expression; carries the
/// zero-based character offset into the source text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation failed: dimension mismatch, domain violation, or a non-finite
/// result that must not be silently clamped.
class EvalError : public Error {
public:
    using Error::Error;
};

/// The exact derivative does not exist at the requested point (abs at 0).
class NonDifferentiableError : public EvalError {
public:
    using EvalError::EvalError;
};

/// Adaptive quadrature failed to converge within its depth budget, or the
/// reconstruction identity check failed after a retry.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// An iterative method (Newton, Jacobi sweep, adaptive stepper) did not
/// converge within its iteration budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Invalid user input (system files, CLI values). Messages start with a
/// JSON-pointer-style path when the input is a document.
class InputError : public Error {
public:
    using Error::Error;
};

} // namespace lyapcert
