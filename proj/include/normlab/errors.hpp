// Error types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace normlab {

/// Malformed arguments: dimension mismatches, out-of-range parameters,
/// ill-shaped expression trees.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Structural kernel computation was requested for an expression outside
/// the subadditive fragment, where the zero set need not be a subspace.
struct UnsupportedExpression : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The functional is identically zero; the scaled-l1 majorant is undefined.
struct ZeroSeminorm : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The functional vanishes on every working-basis vector yet is nonzero
/// elsewhere. Cannot happen for a genuine seminorm over a spanning basis;
/// signals a broken expression or tolerance misconfiguration.
struct ZeroOnBasis : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace normlab
