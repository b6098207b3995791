#pragma once

#include <stdexcept>
#include <string>

namespace seqspec {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed user input: bad dimension rules, unparsable configs, empty requests.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// Structural misuse of the sequence algebra (dimension mismatch, oversized perturbation).
class AlgebraError : public Error {
public:
    explicit AlgebraError(const std::string& msg) : Error(msg) {}
};

/// A documented precondition was violated (e.g. non-Hermitian input to a Hermitian solver).
class ContractError : public Error {
public:
    explicit ContractError(const std::string& msg) : Error(msg) {}
};

/// An iterative kernel failed to converge; carries the residual it reached.
class NumericError : public Error {
public:
    NumericError(const std::string& msg, double achieved_residual)
        : Error(msg), achieved_residual_(achieved_residual) {}

    double achieved_residual() const noexcept { return achieved_residual_; }

private:
    double achieved_residual_;
};

} // namespace seqspec
