#pragma once

#include <stdexcept>
#include <string>

namespace ldf {

/// Input outside an operation's domain (bad index, length mismatch, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Enumeration-size limit exceeded; the message names the cap.
class CapacityError : public std::runtime_error {
public:
    CapacityError(const std::string& what, std::size_t cap)
        : std::runtime_error(what + " (cap is " + std::to_string(cap) + ")"), cap_(cap) {}

    std::size_t cap() const noexcept { return cap_; }

private:
    std::size_t cap_;
};

/// Requested estimation/arithmetic mode is not available for the input.
class ModeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quantity undefined for the input (e.g. a ratio with a zero denominator).
class DegenerateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed model or experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ldf
