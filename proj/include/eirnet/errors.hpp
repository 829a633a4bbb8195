#pragma once

#include <stdexcept>
#include <string>

namespace eirnet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The 2x2 matrix is not a hyperbolic toral automorphism.
class NotHyperbolic : public Error {
public:
    using Error::Error;
};

/// The requested rotation-map geometry cannot be realized.
class InfeasibleGeometry : public Error {
public:
    using Error::Error;
};

/// An adaptive integration exceeded its step budget.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A tangent step was requested on (or within tolerance of) the singularity set.
class OnSingularity : public Error {
public:
    using Error::Error;
};

/// Malformed or schema-incompatible input document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A domain object was constructed with values violating its invariants.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace eirnet
