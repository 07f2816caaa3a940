#pragma once

#include <stdexcept>
#include <string>

namespace cavcat {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A precondition on an argument was violated.
struct InvalidArgument : Error {
    using Error::Error;
};

// The requested Fock truncation drops more probability mass than allowed.
struct TruncationLossError : Error {
    using Error::Error;
};

// The cat-state normalization vanishes (e.g. |0> - |0>).
struct DegenerateStateError : Error {
    using Error::Error;
};

// Operation only defined in a regime the caller is not in (e.g. off resonance).
struct UnsupportedRegimeError : Error {
    using Error::Error;
};

// A computed quantity violated an invariant by more than roundoff.
struct ConsistencyError : Error {
    using Error::Error;
};

// Adaptive step size collapsed below the representable minimum.
struct StiffnessError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace cavcat
