#pragma once

#include <stdexcept>
#include <string>

namespace anderson {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters, malformed configuration, or unusable input files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A requested object exceeds the configured memory/size budget.
class ResourceError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Dimension mismatch between operands (e.g. field vs. geometry).
class ShapeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Numerical failure: eigensolver non-convergence, unusable factorization.
class SolverError : public Error {
public:
    using Error::Error;
};

/// A bounded search ended without a qualifying value.
class SearchError : public SolverError {
public:
    using SolverError::SolverError;
};

/// A property/verification suite found a violated invariant.
class CheckError : public Error {
public:
    using Error::Error;
};

} // namespace anderson
