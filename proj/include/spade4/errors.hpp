#pragma once

#include <stdexcept>
#include <string>

namespace spade4 {

// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// File access problems (missing file, unwritable directory).
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed input text (CSV rows, config lines). Messages name the offending line.
class ParseError : public Error {
public:
    using Error::Error;
};

// Violated preconditions or invalid configuration values.
class ValidationError : public Error {
public:
    using Error::Error;
};

// A series is too short for the requested operation.
class InsufficientDataError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// An integration or forecast produced a non-finite value.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, double when)
        : Error(what + " at t = " + std::to_string(when)), time(when) {}
    double time;
};

// Parameter estimation failed outright (every restart diverged).
class FitError : public Error {
public:
    using Error::Error;
};

}  // namespace spade4
