#pragma once

#include <stdexcept>
#include <string>

namespace risradar {

// Base class so callers can catch everything from this library at once.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent configuration document (missing field, dB/linear
// conflict, unparsable JSON).
struct ConfigError : Error {
    using Error::Error;
};

// Structurally valid input with physically invalid values.
struct ValidationError : Error {
    using Error::Error;
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    using Error::Error;
};

// Requested design cannot be realized within the power budget.
struct InfeasibleError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace risradar
