#pragma once

#include <stdexcept>
#include <string>

namespace ricci {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad spec, mismatched grids, empty window, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Non-finite values or a stability violation. Runs abort on this, they never clamp.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Configuration text or preset strings could not be parsed.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace ricci
