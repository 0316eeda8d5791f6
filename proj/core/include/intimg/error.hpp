#pragma once

#include <stdexcept>
#include <string>

namespace intimg {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of a formula (non-positive length, bad index, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A Gaussian-beam formula was asked to evaluate a focused-mode (z_i = infinity) beam.
class FocusedModeError : public Error {
public:
    using Error::Error;
};

/// Invalid or inconsistent configuration, including under-resolved sampling grids.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The numerical sampling requested cannot represent the field without aliasing.
class SamplingError : public Error {
public:
    using Error::Error;
};

/// Input has no usable content (all-zero field, empty scene, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Malformed file content or unreadable/unwritable path.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace intimg
