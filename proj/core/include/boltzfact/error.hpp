#pragma once

#include <stdexcept>
#include <string>

namespace boltzfact {

// Index or argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Inconsistent configuration, e.g. a quadrature grid below its exactness bound.
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Request exceeds a size guard (dense tensor too large for memory).
class CapacityError : public std::length_error {
public:
    using std::length_error::length_error;
};

// A data-structure precondition was broken by the caller.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Corrupt or incompatible serialized data.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Time integration produced a non-finite state.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace boltzfact
