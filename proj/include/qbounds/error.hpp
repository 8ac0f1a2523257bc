#pragma once

#include <stdexcept>
#include <string>

namespace qbounds {

/// Raised when an argument violates a documented precondition
/// (dimension mismatch, non-unit direction, unsupported configuration, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical routine fails to meet its accuracy contract.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what, double residual = 0.0)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

}  // namespace qbounds
