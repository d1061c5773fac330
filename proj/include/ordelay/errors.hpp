#pragma once

#include <stdexcept>
#include <string>

namespace ordelay {

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PoleOnEvaluationPoint : NumericalError {
    using NumericalError::NumericalError;
};

struct BoundaryPole : NumericalError {
    using NumericalError::NumericalError;
};

struct TailNotConverged : NumericalError {
    using NumericalError::NumericalError;
};

struct ZeroOnOrOutsideCircle : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonPositiveKappa : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct KappaTooSmall : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct KappaOutOfRegime : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotNegativeRealPart : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QuadratureNotConverged : NumericalError {
    using NumericalError::NumericalError;
};

struct NotOuter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularToeplitz : NumericalError {
    using NumericalError::NumericalError;
};

struct NonPositiveRate : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NonInvertiblePolicyWithFullHistory : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotSupported : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace ordelay
