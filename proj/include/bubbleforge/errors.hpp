#pragma once

#include <stdexcept>
#include <string>

namespace bubbleforge {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition.
struct PreconditionError : Error {
    using Error::Error;
};

// Evaluation outside the domain of validity (e.g. outside the analyticity band).
struct DomainError : Error {
    using Error::Error;
};

// An iteration or extrapolation failed to converge within its budget.
struct ConvergenceError : Error {
    using Error::Error;
};

// A solve finished but did not reach the requested accuracy.
struct AccuracyError : Error {
    double achieved = 0.0;
    AccuracyError(const std::string& msg, double achieved_residual)
        : Error(msg), achieved(achieved_residual) {}
};

// A geometric construction failed (curve leaves its domain, ordering violated, ...).
struct GeometryError : Error {
    using Error::Error;
};

// A requested object does not exist (e.g. rotation number never attained).
struct NotFoundError : Error {
    using Error::Error;
};

// An internal invariant was found broken; indicates a bug, not bad input.
struct ConsistencyError : Error {
    using Error::Error;
};

// A certified trichotomy could not be decided within the refinement budget.
struct UndecidedError : Error {
    using Error::Error;
};

}  // namespace bubbleforge
