#pragma once

#include <stdexcept>
#include <string>

namespace seqopt {

/// Base class for every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad probabilities, unknown indices, inconsistent tables.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A numerical guard tripped (floating-point underflow risk, state-space cap).
class NumericalGuardError : public Error {
public:
    using Error::Error;
};

/// An iterative procedure failed to converge or could not bracket its target.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

} // namespace seqopt
