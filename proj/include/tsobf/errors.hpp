#pragma once

#include <stdexcept>
#include <string>

namespace tsobf {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Filesystem / stream failures. Message carries the offending path.
struct IoError : Error {
    using Error::Error;
};

/// Malformed input structure (CSV header, store manifest, model document).
struct SchemaError : Error {
    using Error::Error;
};

/// Data that violates an operation's domain: empty datasets, constant
/// series, out-of-range parameters, length mismatches.
struct DataError : Error {
    using Error::Error;
};

/// Forecast model fitting failed (non-finite objective, no usable candidate).
struct FitError : Error {
    using Error::Error;
};

/// Toeplitz system is singular or numerically indefinite.
struct SingularityError : Error {
    using Error::Error;
};

} // namespace tsobf
