#pragma once

#include <stdexcept>
#include <string>

namespace edgewatt {

// Bad data: malformed files, invariant violations, arithmetic overflow.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// The device profile lacks a coefficient required by the request
// (e.g. an FC estimate on a device without a_f). CLI exit code 3.
class CalibrationError : public std::runtime_error {
public:
    explicit CalibrationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace edgewatt
