#pragma once

#include <stdexcept>
#include <string>

namespace fishery {

// Base class for failures of the numerical machinery itself (as opposed to
// bad user input, which surfaces as std::invalid_argument / std::domain_error).
struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Root finder got a bracket without a sign change.
struct NoSignChange : NumericsError {
    using NumericsError::NumericsError;
};

// A scan over an interval found no root of the target function.
struct NoRoot : NumericsError {
    using NumericsError::NumericsError;
};

// Adaptive step size underflowed or the step budget ran out.
struct StepFailure : NumericsError {
    using NumericsError::NumericsError;
};

// A curve integration never reached its terminal event.
struct NoCrossing : NumericsError {
    using NumericsError::NumericsError;
};

// A one-parameter family sweep behaved inconsistently (non-monotone
// predicate, unordered samples).
struct SweepFailure : NumericsError {
    using NumericsError::NumericsError;
};

// Two independently computed quantities that must agree do not.
struct CrossValidationFailure : NumericsError {
    using NumericsError::NumericsError;
};

// Warm-started continuation lost its root.
struct ContinuationStall : NumericsError {
    using NumericsError::NumericsError;
};

// A simulated trajectory missed a scheduled arrival.
struct EventMiss : NumericsError {
    using NumericsError::NumericsError;
};

// State left the admissible box by more than slack.
struct ConstraintBreach : NumericsError {
    using NumericsError::NumericsError;
};

// Objective tail rule not applicable to the trajectory at the horizon.
struct TailUnavailable : NumericsError {
    using NumericsError::NumericsError;
};

// Requested point has no synthesized policy.
struct UnsupportedRegion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace fishery
