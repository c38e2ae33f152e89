#pragma once

#include <stdexcept>
#include <string>

namespace regencool {

// Error taxonomy; the CLI maps each branch onto a fixed exit code
// (validation -> 2, convergence/divergence -> 3, io -> 4).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File missing, unreadable or unwritable.
struct IoError : Error {
    using Error::Error;
};

// File exists but its contents do not match the documented schema.
struct ParseError : Error {
    using Error::Error;
};

// Violated invariant or inadmissible argument.
struct ValidationError : Error {
    using Error::Error;
};

// Query outside the validity range of a table or bracket.
struct OutOfRangeError : ValidationError {
    using ValidationError::ValidationError;
};

// An iterative solver exhausted its iteration budget.
struct ConvergenceError : Error {
    using Error::Error;
};

// Training cost became non-finite.
struct DivergenceError : Error {
    using Error::Error;
};

} // namespace regencool
