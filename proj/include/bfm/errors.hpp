#pragma once

#include <stdexcept>
#include <string>

namespace bfm {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated (resolution, support,
/// compatibility, convergence...). The CLI maps these to exit code 3.
struct guard_error : error {
    using error::error;
};

/// Malformed parameters (bad p, odd state, unknown enum value...).
struct parameter_error : error {
    using error::error;
};

}  // namespace bfm
