// Construction of the discontinuous boosted subnorm and a sequence-based
// continuity probe that detects its jump.
//
// The probe walks a geometric step schedule along each direction and
// extrapolates the limit with a first-order Richardson step (the schedule
// ratio is 10, so the correction divides the last difference by 9). This
// cancels the linear term of a locally Lipschitz functional, leaving an
// extrapolation error of order (smallest step)^2, so genuine jumps stand out
// from approach noise by many decades.
//
// Steps below the membership tolerance of a boost subspace would evaluate the
// boosted branch even off the subspace; the default schedule stops at 1e-8,
// safely above that scale.

#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "normlab/functional.hpp"
#include "normlab/rng.hpp"

namespace normlab {

enum class ProbeVerdict { ContinuousAtPoint, DiscontinuityDetected };

template <FieldScalar Scalar>
struct DirectionTrace {
    VectorX<Scalar> direction;
    bool perturbed = false;          ///< direction was steered off a boost subspace
    std::vector<double> values;      ///< functional values along the schedule
    double extrapolated = 0.0;       ///< Richardson estimate of the limit
    double gap = 0.0;                ///< |extrapolated - value at the point|
    bool consistent = true;          ///< last-three-step extrapolations agree
};

template <FieldScalar Scalar>
struct ProbeResult {
    VectorX<Scalar> point;
    ProbeVerdict verdict = ProbeVerdict::ContinuousAtPoint;
    double gap_estimate = 0.0;
    long directions_tested = 0;
    std::vector<double> step_schedule;
    double value_at_point = 0.0;
    std::vector<DirectionTrace<Scalar>> traces;
};

/// Boosts a continuous (boost-free) functional by kappa on the line spanned
/// by a0. The result is absolutely homogeneous and positive-definite whenever
/// the inner functional is, but jumps at every nonzero point of the line.
template <FieldScalar Scalar>
Functional<Scalar> make_boosted_subnorm(const Functional<Scalar>& inner,
                                        const VectorX<Scalar>& a0, double kappa,
                                        const TolerancePolicy& tol = {}) {
    if (contains_boost(inner)) {
        throw InvalidInput("make_boosted_subnorm: inner functional must be boost-free");
    }
    if (a0.size() != inner.dim()) throw InvalidInput("make_boosted_subnorm: dimension mismatch");
    if (!(a0.norm() > 0.0)) throw InvalidInput("make_boosted_subnorm: a0 must be nonzero");
    if (std::isnan(kappa) || kappa <= 1.0 || std::isinf(kappa)) {
        throw InvalidInput("make_boosted_subnorm: kappa must be finite and > 1");
    }
    MatrixX<Scalar> column(a0.size(), 1);
    column.col(0) = a0;
    return subspace_boost(Subspace<Scalar>::span(column, tol), kappa, inner);
}

/// Probes continuity of f at a point: evaluates f along point + t * d for a
/// geometric schedule t in {1e-1, ..., 1e-steps} over the working-basis
/// directions plus `directions` random unit directions, extrapolates each
/// approach to t -> 0, and compares with the value at the point.
///
/// When the point lies on a boost subspace, directions inside that subspace
/// would approach along the boosted branch and see no jump; such directions
/// are steered off the subspace so every approach samples the complementary
/// branch, matching the limit being probed.
template <FieldScalar Scalar>
ProbeResult<Scalar> continuity_probe(const Functional<Scalar>& f, const VectorX<Scalar>& point,
                                     long directions, int steps, std::uint64_t seed,
                                     const TolerancePolicy& tol = {}) {
    if (directions < 1) throw InvalidInput("continuity_probe: directions must be >= 1");
    if (steps < 2) throw InvalidInput("continuity_probe: steps must be >= 2");
    if (point.size() != f.dim()) throw InvalidInput("continuity_probe: dimension mismatch");
    tol.validate();

    const Eigen::Index n = f.dim();
    ProbeResult<Scalar> result;
    result.point = point;
    result.value_at_point = f(point);
    for (int j = 1; j <= steps; ++j) result.step_schedule.push_back(std::pow(10.0, -j));

    std::vector<Subspace<Scalar>> containing;
    for (const auto& sub : collect_boost_subspaces(f)) {
        if (sub.contains(point) && sub.dim() > 0 && sub.dim() < n) containing.push_back(sub);
    }

    std::vector<VectorX<Scalar>> dirs;
    for (Eigen::Index j = 0; j < n; ++j) {
        VectorX<Scalar> e = VectorX<Scalar>::Zero(n);
        e(j) = Scalar(1);
        dirs.push_back(std::move(e));
    }
    for (long j = 0; j < directions; ++j) {
        SampleStream stream(seed, static_cast<std::uint64_t>(j));
        dirs.push_back(stream.unit_vector<Scalar>(n));
    }

    SampleStream perturb_stream(derive_seed(seed, 0xD17ULL));
    for (auto& d : dirs) {
        DirectionTrace<Scalar> trace;
        trace.direction = d;
        for (const auto& sub : containing) {
            int attempts = 0;
            while (sub.contains(trace.direction) && attempts++ < 64) {
                VectorX<Scalar> off = perturb_stream.unit_vector<Scalar>(n);
                off -= sub.project(off);
                const double len = off.norm();
                if (len <= 1e-300) continue;
                trace.direction = (trace.direction + off / Scalar(len)).normalized();
                trace.perturbed = true;
            }
        }

        trace.values.reserve(result.step_schedule.size());
        for (const double t : result.step_schedule) {
            trace.values.push_back(f((point + Scalar(t) * trace.direction).eval()));
        }
        const std::size_t last = trace.values.size() - 1;
        trace.extrapolated =
            trace.values[last] + (trace.values[last] - trace.values[last - 1]) / 9.0;
        if (trace.values.size() >= 3) {
            const double previous =
                trace.values[last - 1] + (trace.values[last - 1] - trace.values[last - 2]) / 9.0;
            trace.consistent =
                std::abs(trace.extrapolated - previous) <=
                10.0 * (tol.abs_tol +
                        tol.rel_tol * std::max(std::abs(trace.extrapolated), result.value_at_point));
        }
        trace.gap = std::abs(trace.extrapolated - result.value_at_point);
        result.gap_estimate = std::max(result.gap_estimate, trace.gap);
        result.traces.push_back(std::move(trace));
    }

    result.directions_tested = static_cast<long>(dirs.size());
    result.verdict = result.gap_estimate > 100.0 * tol.abs_tol
                         ? ProbeVerdict::DiscontinuityDetected
                         : ProbeVerdict::ContinuousAtPoint;
    return result;
}

}  // namespace normlab
