#pragma once

#include <stdexcept>
#include <string>

namespace mmot {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The cloud hides an atom: every candidate direction leaves too much mass
/// on a single projection value.
struct DegenerateCloud : Error {
    using Error::Error;
};

/// A gapped split produced two cells at zero distance (projection ties ate
/// the spatial width of a gap).
struct GapCollapse : Error {
    using Error::Error;
};

/// The diffuse part is too small for the requested partition or plan.
struct InsufficientMass : Error {
    using Error::Error;
};

/// A weight vector does not satisfy the inequality required by the
/// discrete construction.
struct ConditionViolated : Error {
    using Error::Error;
};

/// The leave-one-out weight solve produced a negative coefficient.
struct NegativeWeight : Error {
    using Error::Error;
};

struct InsertIntoSymmetrized : Error {
    using Error::Error;
};

struct DiffuseIntoMapBlock : Error {
    using Error::Error;
};

struct UnsymmetrizedPlan : Error {
    using Error::Error;
};

struct ExpansionTooLarge : Error {
    using Error::Error;
};

struct ArityMismatch : Error {
    using Error::Error;
};

struct SizeCap : Error {
    using Error::Error;
};

/// Input marginal failed validation (reported with the offending checks).
struct ValidationFailed : Error {
    using Error::Error;
};

/// Malformed input file or JSON document.
struct ParseError : Error {
    using Error::Error;
};

/// A runtime mass-ledger or structural assertion failed. Indicates a bug,
/// not bad input.
struct InternalAssertion : Error {
    using Error::Error;
};

}  // namespace mmot
