#pragma once

#include <stdexcept>
#include <string>

namespace fibrelax {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad user input (config files, CLI arguments). Exit code 2.
struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& field_path, const std::string& what)
        : Error("config invalid at '" + field_path + "': " + what), path(field_path) {}
    std::string path;
};

struct IoError : Error {
    using Error::Error;
};

// Numerical failures (stability, convergence). Exit code 3.
struct NumericalError : Error {
    using Error::Error;
};
struct UnstableStep : NumericalError {
    using NumericalError::NumericalError;
};
struct CFLViolation : NumericalError {
    using NumericalError::NumericalError;
};
struct DensityFloorViolated : NumericalError {
    using NumericalError::NumericalError;
};
struct NotElliptic : NumericalError {
    using NumericalError::NumericalError;
};
struct MaxIterationsExceeded : NumericalError {
    using NumericalError::NumericalError;
};
struct NotConverged : NumericalError {
    using NumericalError::NumericalError;
};

// Domain violations on individual operations.
struct DomainError : Error {
    using Error::Error;
};
struct ParallelFibers : DomainError {
    using DomainError::DomainError;
};
struct NonPositiveMobility : DomainError {
    using DomainError::DomainError;
};
struct EmptySample : DomainError {
    using DomainError::DomainError;
};
struct NegativeConcentration : DomainError {
    using DomainError::DomainError;
};
struct IsotropicSingular : DomainError {
    using DomainError::DomainError;
};
struct NonPositiveDensity : DomainError {
    using DomainError::DomainError;
};

} // namespace fibrelax
