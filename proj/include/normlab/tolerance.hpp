#pragma once

#include <algorithm>
#include <cmath>

#include "normlab/errors.hpp"

namespace normlab {

/// Tolerance knobs used by every comparison in the library.
///
/// `rank_tol` is relative: the singular-value cutoff used for rank decisions
/// is rank_tol * (largest singular value).
struct TolerancePolicy {
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    double rank_tol = 1e-10;

    void validate() const {
        if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0) || !(rank_tol >= 0.0)) {
            throw InvalidInput("TolerancePolicy: all fields must be nonnegative");
        }
    }

    /// Margin for comparing two values of comparable scale.
    [[nodiscard]] double margin(double lhs, double rhs) const {
        return abs_tol + rel_tol * std::max(std::abs(lhs), std::abs(rhs));
    }

    /// |lhs - rhs| within the symmetric relative margin.
    [[nodiscard]] bool close(double lhs, double rhs) const {
        return std::abs(lhs - rhs) <= margin(lhs, rhs);
    }

    /// lhs <= rhs, allowing the symmetric relative margin.
    [[nodiscard]] bool leq(double lhs, double rhs) const {
        return lhs <= rhs + margin(lhs, rhs);
    }
};

}  // namespace normlab
