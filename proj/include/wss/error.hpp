#pragma once

#include <stdexcept>
#include <string>

namespace wss {

// Invalid experiment or model configuration (bad ranges, inconsistent sizes).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Caller violated an operation's precondition (bad index, dimension mismatch).
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical failure that should not happen for well-formed inputs.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace wss
