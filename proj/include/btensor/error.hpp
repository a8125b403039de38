#pragma once

#include <stdexcept>
#include <string>

namespace btensor {

/// Raised when arguments violate an operation's preconditions
/// (bad shapes, out-of-range indices, non-finite entries).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an input is well-formed but outside the class an operation
/// requires, e.g. decomposing a tensor that is not quasi-double B.
/// `witness()` carries the classifier's explanation.
class PreconditionError : public std::runtime_error {
public:
    PreconditionError(const std::string& what, std::string witness)
        : std::runtime_error(what + ": " + witness), witness_(std::move(witness)) {}

    const std::string& witness() const noexcept { return witness_; }

private:
    std::string witness_;
};

}  // namespace btensor
