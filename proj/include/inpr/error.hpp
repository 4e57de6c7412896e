#pragma once

#include <stdexcept>
#include <string>

namespace inpr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Invalid or unsupported configuration value (lambda <= 0, bad order, empty grid).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Mismatched dimensions or lengths.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed or insufficient input data.
class InputError : public Error {
public:
    using Error::Error;
};

/// Factorization failure or non-finite results.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Text input that cannot be parsed; the message carries the line number.
class ParseError : public InputError {
public:
    ParseError(const std::string& what, long line)
        : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
    long line() const noexcept { return line_; }

private:
    long line_;
};

/// Spectral sum truncated too early for the requested accuracy.
class TruncationError : public Error {
public:
    using Error::Error;
};

}  // namespace inpr
