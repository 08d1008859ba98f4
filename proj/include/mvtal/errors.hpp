// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mvtal {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem problems: missing file, unwritable path.
struct IoError : Error {
    using Error::Error;
};

// Malformed file contents; message names the file and line.
struct FormatError : Error {
    using Error::Error;
};

// Invalid configuration value; message names the offending key.
struct ConfigError : Error {
    using Error::Error;
};

// Tensor / weight dimension mismatch.
struct ShapeError : Error {
    using Error::Error;
};

// Value outside its documented domain (e.g. segment beyond video extent).
struct RangeError : Error {
    using Error::Error;
};

// Input exceeds a documented size guard.
struct CapacityError : Error {
    using Error::Error;
};

// Caller violated a documented precondition.
struct ContractError : Error {
    using Error::Error;
};

// Input validation failure spanning multiple files.
struct ValidationError : Error {
    using Error::Error;
};

// Scenario parameters cannot produce a valid schedule.
struct GenerationError : Error {
    using Error::Error;
};

}  // namespace mvtal
