#pragma once

#include <stdexcept>
#include <string>

namespace carsr {

// Every failure raised by the library derives from Error so the CLI can map
// categories onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration value. The message names the offending field.
class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& detail)
        : Error(field + ": " + detail), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Missing or undecodable input data.
class InputError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or activations during training.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Checkpoint tensors do not match the requested model configuration.
class IncompatibleCheckpoint : public Error {
public:
    using Error::Error;
};

}  // namespace carsr
