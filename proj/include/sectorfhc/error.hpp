#pragma once

#include <stdexcept>
#include <string>

namespace sectorfhc {

// Root of every library exception. Commands map subclasses to exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or out-of-range arguments.
class InputError : public Error {
public:
    using Error::Error;
};

// Arguments are well formed but violate an operation's precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A translation vector does not sit on the grid of the function it acts on.
class AlignmentError : public InputError {
public:
    using InputError::InputError;
};

class HorizonTooSmall : public Error {
public:
    HorizonTooSmall(std::size_t level, const std::string& what)
        : Error(what), level_(level) {}
    std::size_t level() const noexcept { return level_; }

private:
    std::size_t level_;
};

class CatalogError : public Error {
public:
    using Error::Error;
};

// A weight produced a non-finite value at a quadrature or sampling node.
class EvaluationError : public Error {
public:
    EvaluationError(double x, double y, const std::string& what)
        : Error(what), x_(x), y_(y) {}
    double x() const noexcept { return x_; }
    double y() const noexcept { return y_; }

private:
    double x_, y_;
};

// The weight integral diverges, so the translation-semigroup criterion
// cannot be applied.
class CriterionInapplicable : public Error {
public:
    using Error::Error;
};

class ConstructionFailed : public Error {
public:
    using Error::Error;
};

class VerificationFailed : public Error {
public:
    using Error::Error;
};

// Geometric configuration outside what the exact area engine supports.
class GeometryError : public Error {
public:
    using Error::Error;
};

} // namespace sectorfhc
