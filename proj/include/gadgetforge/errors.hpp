#pragma once

#include <stdexcept>
#include <string>

namespace gadgetforge {

// Input or configuration rejected before any numerics ran.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested dense realization exceeds the configured qubit cap.
struct DimensionError : ValidationError {
    using ValidationError::ValidationError;
};

// A computation was attempted and failed (singular block, pole hit,
// optimizer could not bracket, ...).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace gadgetforge
