#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "geodequiv/format.hpp"

namespace geodequiv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Syntax error in a metric-DSL expression.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
        : Error(message + " at offset " + std::to_string(offset)),
          offset_(offset),
          expected_(std::move(expected)) {}

    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

class UnknownIdentifierError : public ParseError {
public:
    UnknownIdentifierError(std::string name, std::size_t offset)
        : ParseError("unknown identifier \"" + name + "\"", offset, {}), name_(std::move(name)) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

/// A built-in function or power was evaluated outside its real domain.
class DomainError : public Error {
public:
    DomainError(std::string function, double argument)
        : Error("domain error in " + function + "(" + format_double(argument) + ")"),
          function_(std::move(function)),
          argument_(argument) {}
    const std::string& function() const { return function_; }
    double argument() const { return argument_; }

private:
    std::string function_;
    double argument_;
};

class NotPositiveDefiniteError : public Error {
public:
    NotPositiveDefiniteError(std::vector<double> point, std::size_t minor)
        : Error("metric not positive definite (leading minor " + std::to_string(minor) + ")"),
          point_(std::move(point)),
          minor_(minor) {}
    const std::vector<double>& point() const { return point_; }
    /// 1-based index of the first non-positive leading minor.
    std::size_t minor() const { return minor_; }

private:
    std::vector<double> point_;
    std::size_t minor_;
};

class ChartDomainError : public Error {
public:
    using Error::Error;
};

class ZeroTangentError : public Error {
public:
    ZeroTangentError() : Error("tangent vector is zero") {}
    using Error::Error;
};

class IntegrationError : public Error {
public:
    using Error::Error;
};

class EnergyDriftError : public IntegrationError {
public:
    EnergyDriftError(double drift, double tolerance)
        : IntegrationError("energy drift " + format_double(drift) + " exceeds tolerance " +
                           format_double(tolerance)),
          drift_(drift) {}
    double drift() const { return drift_; }

private:
    double drift_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace geodequiv
