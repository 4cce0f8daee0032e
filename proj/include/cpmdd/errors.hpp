#pragma once

#include <stdexcept>
#include <string>

namespace cpmdd {

// Invalid format or experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A trellis would exceed the configured state budget.
class CapacityError : public std::runtime_error {
public:
    CapacityError(const std::string& what, std::size_t required)
        : std::runtime_error(what), required_(required) {}
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t required_;
};

// Malformed operation input (length mismatch, short signal, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cpmdd
