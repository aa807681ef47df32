#ifndef ITEP_TYPES_HPP
#define ITEP_TYPES_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace itep {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;

/// A complex number carried as mantissa and natural-log exponent:
/// the represented value is `value * exp(log_scale)`.
struct ScaledComplex {
    Complex value{0.0, 0.0};
    double log_scale{0.0};

    /// Collapses to a plain complex number. Overflows to inf for large scales.
    Complex unscaled() const { return value * std::exp(log_scale); }

    /// log|value * exp(log_scale)|; -inf for an exact zero.
    double log_abs() const { return std::log(std::abs(value)) + log_scale; }

    /// Same number re-expressed relative to `reference` (value * exp(log_scale - reference)).
    Complex relative_to(double reference) const { return value * std::exp(log_scale - reference); }
};

inline ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b)
{
    return {a.value * b.value, a.log_scale + b.log_scale};
}

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input (configuration, domain of a function, malformed geometry).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not deliver a trustworthy result.
class NumericError : public Error {
public:
    using Error::Error;
};

class OverflowGuard : public NumericError {
public:
    using NumericError::NumericError;
};

class StepUnderflow : public NumericError {
public:
    using NumericError::NumericError;
};

class TangencyUnresolved : public NumericError {
public:
    using NumericError::NumericError;
};

class PoleProximity : public NumericError {
public:
    using NumericError::NumericError;
};

class BoundaryZero : public NumericError {
public:
    using NumericError::NumericError;
};

class NonIntegerWinding : public NumericError {
public:
    using NumericError::NumericError;
};

class IncompatibleTruncation : public NumericError {
public:
    using NumericError::NumericError;
};

/// An iterative solver stopped without meeting its tolerance.
class NonConvergence : public Error {
public:
    using Error::Error;
};

} // namespace itep

#endif // ITEP_TYPES_HPP
