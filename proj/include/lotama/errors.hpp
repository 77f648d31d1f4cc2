#pragma once

#include <stdexcept>
#include <string>

namespace lotama {

// Error taxonomy maps onto CLI exit codes: ConfigError -> 2,
// NumericalError -> 3, InvariantViolation -> 4.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvariantViolation : std::runtime_error {
    explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace lotama
