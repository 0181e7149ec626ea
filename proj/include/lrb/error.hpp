#pragma once

#include <stdexcept>
#include <string>

namespace lrb {

// Base class for all library errors. Everything recoverable that the library
// raises derives from this, so callers can catch one type at the boundary.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape mismatch between operands (non-square inverse, bad matvec length, ...).
struct DimensionError : Error {
    using Error::Error;
};

// Matrix numerically singular under the requested pivot tolerance.
struct SingularError : Error {
    using Error::Error;
};

// Invalid argument value: probabilities off, eps out of range, bad index, ...
struct ParameterError : Error {
    using Error::Error;
};

// Input matrix does not have the rank the operation needs.
struct RankError : Error {
    using Error::Error;
};

// Work bound exceeded (exhaustive subset search too large).
struct BudgetError : Error {
    using Error::Error;
};

// A recommendation was requested before the state has seen enough data.
struct InsufficientDataError : Error {
    using Error::Error;
};

// Seed estimation impossible: design matrix singular under the sampling law.
struct EstimatorError : Error {
    using Error::Error;
};

// A sampled reward vector escaped the admissible range; the model violates
// its own contract and the run must not continue silently.
struct ValidationError : Error {
    using Error::Error;
};

// Malformed configuration file or CLI usage.
struct ConfigError : Error {
    using Error::Error;
};

} // namespace lrb
