#pragma once

#include <stdexcept>
#include <string>

namespace tweezer {

// Every failure raised by the library derives from Error so callers can catch
// one type; the subclasses exist so the CLI can map them to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

// Non-convergence, NaN, or any other numerical breakdown.
class NumericError : public Error {
public:
    using Error::Error;
};

// Probability amplitude reached the edge of the simulation box.
class DomainOverflowError : public NumericError {
public:
    using NumericError::NumericError;
};

// Two objects that must share a grid or sampling do not.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Potential geometry does not satisfy a precondition (e.g. not a minimum).
class GeometryError : public Error {
public:
    using Error::Error;
};

class UnsupportedStatesError : public Error {
public:
    using Error::Error;
};

// Laser frequency coincides with an atomic line.
class ResonanceError : public Error {
public:
    using Error::Error;
};

class NoNullError : public Error {
public:
    using Error::Error;
};

// Interaction energies are degenerate, so no differential phase builds up.
class NoGateError : public Error {
public:
    using Error::Error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, int column = 0)
        : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " +
                               std::to_string(column) + ")"
                         : what),
          line_(line),
          column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

}  // namespace tweezer
