#pragma once

#include <stdexcept>
#include <string>

namespace varinfer {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NonSquare : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    using Error::Error;
};

/// Spectral radius >= 1 where a stable matrix is required.
struct Unstable : Error {
    using Error::Error;
};

/// Spectral decay index search exceeded its iteration cap.
struct CapExceeded : Error {
    using Error::Error;
};

/// A simulated state exceeded the magnitude guard.
struct Overflow : Error {
    using Error::Error;
};

struct IndexOutOfRange : Error {
    using Error::Error;
};

struct NotConverged : Error {
    using Error::Error;
};

/// Some mu-hat entry fell below the configured floor and was consumed
/// without an explicit override.
struct DegenerateMu : Error {
    using Error::Error;
};

/// PSD clipping removed more mass than the tolerance allows.
struct ExcessiveClip : Error {
    using Error::Error;
};

struct DegenerateDesign : Error {
    using Error::Error;
};

struct EmptyDraws : Error {
    using Error::Error;
};

struct EmptyInput : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace varinfer
