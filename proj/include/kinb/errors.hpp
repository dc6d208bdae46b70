#pragma once

#include <stdexcept>
#include <string>

namespace kinb {

// Invalid user input; maps to exit code 1.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Instability, NaN or under-resolution; maps to exit code 2.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace kinb
