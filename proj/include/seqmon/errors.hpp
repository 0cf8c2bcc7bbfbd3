#pragma once

#include <stdexcept>
#include <string>

namespace seqmon {

// Base for every error raised by the library. The CLI maps ConfigError to
// exit code 2 and DataError (plus the numerical errors) to exit code 3.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class SingularMatrixError : public Error {
public:
    using Error::Error;
};

// Raised when the training residual variance is exactly zero, which makes the
// detector undefined.
class DegenerateVarianceError : public Error {
public:
    using Error::Error;
};

class StateError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace seqmon
