#pragma once

#include <stdexcept>
#include <string>

namespace strips {

// Jacobian f of the Fermi parametrization hit zero or below: the strip is
// not a local diffeomorphism at this half-width.
struct NonPositiveJacobian : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A user-supplied curvature callback threw or produced a non-finite value.
struct EvaluationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PreconditionViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientData : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct FactorizationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// |<v, ref>_M| below threshold: eigenvalue crossing or wrong mode pairing.
struct DegenerateAlignment : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// max - min of a grid function is numerically zero (constant mode supplied).
struct DegenerateRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace strips
