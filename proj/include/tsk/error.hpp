#pragma once

#include <stdexcept>
#include <string>

namespace tsk {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Parameter-domain violation (non-positive spread, unordered trapezoid, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Mismatched vector or matrix dimensions.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed or insufficient input data.
class DataError : public Error {
public:
    using Error::Error;
};

/// Invalid training, pruning, or experiment configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace tsk
