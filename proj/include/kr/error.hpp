#pragma once

#include <stdexcept>
#include <string>

namespace kr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or structurally invalid ontology document.
class OntologyError : public Error {
public:
    using Error::Error;
};

/// Bad input data: CSV, series shape, numeric preconditions.
class DataError : public Error {
public:
    using Error::Error;
};

/// Unknown id (class, instance, device, incident).
class NotFound : public Error {
public:
    using Error::Error;
};

/// A value failed validation; `field` names the offending member.
class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& message)
        : Error(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Unusable configuration: missing paths, out-of-range thresholds.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace kr
