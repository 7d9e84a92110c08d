// Kernels of seminorms, cosets of the quotient space, the induced quotient
// norm, and randomized audits of its well-definedness.
//
// Kernel computation is structural: each subadditive variant contributes a
// stack of linear constraints whose nullspace is the kernel. Expressions
// outside that fragment (subspace boosts, p-norms with p < 1) are rejected,
// because without subadditivity the zero set need not be a subspace.

#pragma once

#include <optional>
#include <utility>

#include "normlab/functional.hpp"
#include "normlab/linalg.hpp"
#include "normlab/rng.hpp"

namespace normlab {

/// Rows of the returned matrix are linear constraints; the kernel of f is
/// exactly the nullspace of the stack. A 0-row matrix means no constraints
/// (the kernel is the whole space). Throws UnsupportedExpression outside the
/// subadditive fragment.
template <FieldScalar Scalar>
MatrixX<Scalar> kernel_constraints(const Functional<Scalar>& f) {
    const Eigen::Index n = f.dim();
    switch (f.kind()) {
        case ExprKind::PNorm: {
            if (f.template as<detail::PNormNode<Scalar>>().p < 1.0) {
                throw UnsupportedExpression("kernel: p-norm with p < 1 is not a seminorm");
            }
            return MatrixX<Scalar>::Identity(n, n);
        }
        case ExprKind::OneDimWeight:
            return MatrixX<Scalar>::Identity(1, 1);
        case ExprKind::AbsLinear: {
            const auto& node = f.template as<detail::AbsLinearNode<Scalar>>();
            MatrixX<Scalar> row(1, n);
            row.row(0) = node.phi.transpose();
            return row;
        }
        case ExprKind::Scale: {
            const auto& node = f.template as<detail::ScaleNode<Scalar>>();
            if (node.c == 0.0) return MatrixX<Scalar>(0, n);
            return kernel_constraints(node.inner);
        }
        case ExprKind::MatrixPrecompose: {
            const auto& node = f.template as<detail::MatrixPrecomposeNode<Scalar>>();
            MatrixX<Scalar> inner_rows = kernel_constraints(node.inner);
            if (inner_rows.rows() == 0) return MatrixX<Scalar>(0, n);
            return inner_rows * node.a;
        }
        case ExprKind::Sum:
        case ExprKind::Max: {
            // Terms are nonnegative, so the composite vanishes exactly where
            // every term vanishes: stack all constraints.
            const auto& terms = f.kind() == ExprKind::Sum
                                    ? f.template as<detail::SumNode<Scalar>>().terms
                                    : f.template as<detail::MaxNode<Scalar>>().terms;
            std::vector<MatrixX<Scalar>> blocks;
            Eigen::Index rows = 0;
            for (const auto& t : terms) {
                blocks.push_back(kernel_constraints(t));
                rows += blocks.back().rows();
            }
            MatrixX<Scalar> stack(rows, n);
            Eigen::Index at = 0;
            for (const auto& b : blocks) {
                stack.middleRows(at, b.rows()) = b;
                at += b.rows();
            }
            return stack;
        }
        case ExprKind::SubspaceBoost:
            throw UnsupportedExpression("kernel: subspace boost is not a seminorm");
    }
    throw UnsupportedExpression("kernel: unknown expression variant");
}

/// Orthonormal basis of ker f = {x : f(x) = 0}, computed structurally.
template <FieldScalar Scalar>
Subspace<Scalar> kernel_basis(const Functional<Scalar>& f, const SpaceDescriptor<Scalar>& space) {
    if (f.dim() != space.dim()) throw InvalidInput("kernel_basis: dimension mismatch");
    MatrixX<Scalar> constraints = kernel_constraints(f);
    if (constraints.rows() == 0) {
        return Subspace<Scalar>::from_orthonormal(
            MatrixX<Scalar>::Identity(space.dim(), space.dim()), space.tol());
    }
    return nullspace(constraints, space.tol());
}

/// Structural kernel when the expression supports it, std::nullopt otherwise.
template <FieldScalar Scalar>
std::optional<Subspace<Scalar>> try_kernel_basis(const Functional<Scalar>& f,
                                                 const SpaceDescriptor<Scalar>& space) {
    try {
        return kernel_basis(f, space);
    } catch (const UnsupportedExpression&) {
        return std::nullopt;
    }
}

/// An element of the quotient space: a representative vector plus the kernel
/// it is taken modulo. Self-validating: equality of cosets is decidable from
/// the stored data alone.
template <FieldScalar Scalar>
struct Coset {
    VectorX<Scalar> rep;
    Subspace<Scalar> kernel;

    Coset(VectorX<Scalar> rep_, Subspace<Scalar> kernel_)
        : rep(std::move(rep_)), kernel(std::move(kernel_)) {
        if (rep.size() != kernel.ambient_dim()) {
            throw InvalidInput("Coset: representative/kernel dimension mismatch");
        }
    }

    /// Two cosets over the same kernel are equal iff the difference of their
    /// representatives lies in the kernel.
    [[nodiscard]] bool same_coset(const Coset& other) const {
        if (!same_subspace(kernel, other.kernel)) return false;
        return kernel.contains((rep - other.rep).eval());
    }
};

/// Value of the induced norm on the quotient: evaluates the seminorm at the
/// representative. Requires the coset's kernel to agree with the given one.
template <FieldScalar Scalar>
double quotient_norm(const Functional<Scalar>& f, const Subspace<Scalar>& kernel,
                     const Coset<Scalar>& c) {
    if (!same_subspace(kernel, c.kernel)) {
        throw InvalidInput("quotient_norm: coset kernel does not match");
    }
    return f(c.rep);
}

enum class AuditVerdict { WellDefined, Inconsistent };

template <FieldScalar Scalar>
struct AuditWitness {
    VectorX<Scalar> a;
    VectorX<Scalar> k;
    double value_at_a;
    double value_at_shifted;
};

template <FieldScalar Scalar>
struct QuotientAudit {
    long trials = 0;
    double max_discrepancy = 0.0;
    AuditVerdict verdict = AuditVerdict::WellDefined;
    std::optional<AuditWitness<Scalar>> witness;
};

/// Randomized check that f is constant on cosets of the given kernel: samples
/// a in V and k in the kernel (random coefficients on the kernel basis,
/// log-uniform magnitudes up to 1e3) and compares f(a) against f(a + k) and
/// f(a - k); the latter also covers the distance-to-kernel identity.
template <FieldScalar Scalar>
QuotientAudit<Scalar> audit_well_definedness(const Functional<Scalar>& f,
                                             const Subspace<Scalar>& kernel, long trials,
                                             std::uint64_t seed,
                                             const TolerancePolicy& tol = {}) {
    if (f.dim() != kernel.ambient_dim()) {
        throw InvalidInput("audit_well_definedness: dimension mismatch");
    }
    if (trials < 1) throw InvalidInput("audit_well_definedness: trials must be >= 1");
    tol.validate();

    QuotientAudit<Scalar> audit;
    audit.trials = trials;
    const Eigen::Index n = f.dim();

    for (long trial = 0; trial < trials; ++trial) {
        SampleStream stream(seed, static_cast<std::uint64_t>(trial));
        const VectorX<Scalar> a = stream.gaussian_vector<Scalar>(n);
        VectorX<Scalar> k = VectorX<Scalar>::Zero(n);
        for (Eigen::Index j = 0; j < kernel.dim(); ++j) {
            k += kernel.basis().col(j) * stream.template random_scalar<Scalar>();
        }
        const double value_a = f(a);
        const double allowed = tol.abs_tol + tol.rel_tol * value_a;
        for (const double sign : {1.0, -1.0}) {
            const VectorX<Scalar> shifted = a + sign * k;
            const double value_shifted = f(shifted);
            const double discrepancy = std::abs(value_a - value_shifted);
            audit.max_discrepancy = std::max(audit.max_discrepancy, discrepancy);
            if (discrepancy > allowed && audit.verdict == AuditVerdict::WellDefined) {
                audit.verdict = AuditVerdict::Inconsistent;
                audit.witness = AuditWitness<Scalar>{a, (sign * k).eval(), value_a, value_shifted};
            }
        }
    }
    return audit;
}

}  // namespace normlab
