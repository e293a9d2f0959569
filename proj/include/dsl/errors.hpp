#pragma once

#include <stdexcept>
#include <string>

namespace dsl {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Steady-state solver hit the hard Fock cutoff with tail population still
// above tolerance.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Direct linear solve failed; the Liouvillian is degenerate at the chosen
// tolerance.
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FlatLandscape : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitDiverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeTooNarrow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EdgeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct AllZeroPosterior : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace dsl
