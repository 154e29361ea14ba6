#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsmooth {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the 0-based byte position of the
/// offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Invalid configuration or invalid arguments at the API boundary.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Mathematical domain violation: log of a non-positive number, division by
/// zero, a solver iterate leaving the admissible strip, etc.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two routes that must agree did not.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// Raised by build_lattice when m = 0, i.e. n*alpha <= 1 and there is no
/// singular expansion to compute.
class ZeroRegularity : public Error {
public:
    using Error::Error;
};

}  // namespace fracsmooth
