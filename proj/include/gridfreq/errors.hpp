#pragma once

#include <stdexcept>

namespace gridfreq {

/// Base class for every error raised by the library. The CLI maps these to
/// exit code 1; usage mistakes surface as exit code 2 before the library runs.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Series or split too short for the requested operation.
struct InsufficientDataError : Error {
    using Error::Error;
};

/// No parsable rows, or an all-gap series where samples are required.
struct EmptyInputError : Error {
    using Error::Error;
};

/// Input rows violate the non-decreasing timestamp precondition.
struct OrderingError : Error {
    using Error::Error;
};

/// Malformed field, sub-second timestamp, or irregular feature grid.
struct FormatError : Error {
    using Error::Error;
};

/// Zero variance where a scale is needed, or a constant feature.
struct DegenerateSeriesError : Error {
    using Error::Error;
};

/// A prediction was requested but the candidate set is empty.
struct NoCandidatesError : Error {
    using Error::Error;
};

/// Mismatched vector lengths.
struct ShapeError : Error {
    using Error::Error;
};

/// Invalid option value (fractions, thresholds, grids, ...).
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace gridfreq
