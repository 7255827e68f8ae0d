#pragma once

#include <stdexcept>
#include <string>

namespace mdpalign {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input: bad dimensions, invalid indices,
/// distributions that do not sum to one, violated preconditions on data.
class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what, std::string field = {})
        : Error(what), field_(std::move(field)) {}

    /// Name of the offending document field, empty when not applicable.
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Errors raised while computing on valid input.
class ComputeError : public Error {
public:
    using Error::Error;
};

/// More than one recurrent class is reachable from the initial distribution.
class MultichainError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

/// An enumeration or exact expansion would exceed its configured cap.
class CapExceeded : public ComputeError {
public:
    using ComputeError::ComputeError;
};

/// A supported x-action has more than one supported y-preimage under g.
class NonInjectiveG : public ComputeError {
public:
    using ComputeError::ComputeError;
};

/// An optimal-relevant y-action has no preimage under psi.
class EmptyPreimage : public ComputeError {
public:
    using ComputeError::ComputeError;
};

/// Value iteration hit its sweep cap, or a linear solve was singular.
class NumericError : public ComputeError {
public:
    using ComputeError::ComputeError;
};

/// Two optimality models were solved under different criteria.
class ModeMismatch : public ComputeError {
public:
    using ComputeError::ComputeError;
};

/// An operation was called on inputs that do not satisfy its documented
/// precondition (e.g. constructing a reduction from unmet objectives).
class PreconditionFailed : public ComputeError {
public:
    using ComputeError::ComputeError;
};

} // namespace mdpalign
