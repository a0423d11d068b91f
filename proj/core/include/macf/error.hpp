#pragma once

#include <stdexcept>
#include <string>

namespace macf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes disagree (matrix dimension, grid size, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An argument is outside the domain an operation is defined on.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A structural identity that must hold exactly was violated beyond tolerance.
class IdentityViolation : public Error {
public:
    using Error::Error;
};

}  // namespace macf
