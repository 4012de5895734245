#pragma once

#include <stdexcept>
#include <string>

namespace ssou {

// Bad parameters or malformed input data. Maps to exit code 2 in the CLI.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Argument outside the domain of a closed-form expression (moment formulas).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// The density integrator could not reach its tolerance within the panel budget.
class QuadratureError : public std::runtime_error {
public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

// Not enough observations for an estimator.
class InsufficientData : public std::invalid_argument {
public:
    explicit InsufficientData(const std::string& what) : std::invalid_argument(what) {}
};

// The first line search from the starting point found no ascent.
class NoAscentError : public std::runtime_error {
public:
    explicit NoAscentError(const std::string& what) : std::runtime_error(what) {}
};

// The observed information is not positive definite.
class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& what) : std::runtime_error(what) {}
};

// File could not be opened, read or written. Maps to exit code 3 in the CLI.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Throws InvalidInput with `what` unless `cond` holds.
void require(bool cond, const std::string& what);

}  // namespace ssou
