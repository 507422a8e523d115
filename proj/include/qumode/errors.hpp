#pragma once

#include <stdexcept>
#include <string>

namespace qumode {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (state vs cutoff, kron overflow, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A matrix handed to an exponential or density-matrix routine violates its
/// structural precondition (anti-Hermitian generator, Hermitian rho).
class GeneratorError : public Error {
public:
    using Error::Error;
};

/// Invalid user-facing configuration: bad target parameters, unknown names,
/// malformed files.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The objective returned a non-finite value; the optimizer run is abandoned.
class OptimizerAbort : public Error {
public:
    using Error::Error;
};

} // namespace qumode
