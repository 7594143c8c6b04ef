#pragma once

#include <stdexcept>
#include <string>

namespace pla {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A type invariant or operation precondition does not hold.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvariantViolation {
public:
    using InvariantViolation::InvariantViolation;
};

/// A decision test with a zero variance term.
class SingularTest : public Error {
public:
    using Error::Error;
};

/// Attack geometry whose closed form has a vanishing denominator.
class SingularGeometry : public Error {
public:
    using Error::Error;
};

/// Iterative routine hit its iteration cap.
class NumericError : public Error {
public:
    using Error::Error;
};

/// No threshold on the search grid reaches the requested false-alarm rate.
class InfeasibleTarget : public Error {
public:
    using Error::Error;
};

/// Metric with an empty denominator.
class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline void require(bool ok, const std::string& what)
{
    if (!ok) throw InvariantViolation(what);
}

inline void require_same_size(std::size_t a, std::size_t b, const char* what)
{
    if (a != b)
        throw DimensionMismatch(std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

} // namespace detail
} // namespace pla
