#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bdmbc {

/// A hyperparameter or argument violated its contract. `parameter()` names
/// the offending input so front ends can report it verbatim.
class ParameterError : public std::invalid_argument {
public:
    ParameterError(std::string parameter, const std::string& message)
        : std::invalid_argument(message), parameter_(std::move(parameter)) {}

    const std::string& parameter() const noexcept { return parameter_; }

private:
    std::string parameter_;
};

/// Malformed input data (CSV cells, generator specs, label files).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Data that is well-formed but numerically unusable for the requested
/// operation, e.g. a zero bagged distance fed to the density estimator.
class DegenerateDataError : public std::domain_error {
public:
    DegenerateDataError(std::size_t point, const std::string& message)
        : std::domain_error(message), point_(point) {}

    std::size_t point() const noexcept { return point_; }

private:
    std::size_t point_;
};

} // namespace bdmbc
