// The scaled-l1 majorant of a seminorm, the Lipschitz bound it implies, and
// equivalence constants between functionals (one-sided and two-sided),
// extracted by derivative-free search over the unit sphere of the reference
// functional.
//
// The optimizer treats both functionals as evaluation-only black boxes:
// multi-start projected coordinate search with a shrinking step, re-normalized
// onto the sphere after every move. Reported constants are best found values,
// never certified upper bounds; validation sampling is folded into the result
// so the returned constant always dominates every sampled ratio.

#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "normlab/functional.hpp"
#include "normlab/parallel.hpp"
#include "normlab/quotient.hpp"
#include "normlab/rng.hpp"

namespace normlab {

/// Largest value of the functional over the working-basis vectors. Strictly
/// positive on success; throws ZeroSeminorm when the functional is identically
/// zero and ZeroOnBasis when it vanishes on the basis but not everywhere.
template <FieldScalar Scalar>
double basis_max(const Functional<Scalar>& f, const SpaceDescriptor<Scalar>& space) {
    if (f.dim() != space.dim()) throw InvalidInput("basis_max: dimension mismatch");
    const Eigen::Index n = space.dim();
    double best = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        VectorX<Scalar> e = VectorX<Scalar>::Zero(n);
        e(j) = Scalar(1);
        best = std::max(best, f(e));
    }
    if (best > space.tol().abs_tol) return best;

    if (auto kernel = try_kernel_basis(f, space)) {
        if (kernel->dim() == n) throw ZeroSeminorm("basis_max: functional is identically zero");
        throw ZeroOnBasis("basis_max: functional vanishes on the basis but not everywhere");
    }
    // Outside the structural fragment: probe random points.
    SampleStream probe(derive_seed(0x5eedULL, static_cast<std::uint64_t>(n)));
    for (int i = 0; i < 128; ++i) {
        if (f(probe.gaussian_vector<Scalar>(n)) > space.tol().abs_tol) {
            throw ZeroOnBasis("basis_max: functional vanishes on the basis but not everywhere");
        }
    }
    throw ZeroSeminorm("basis_max: functional is identically zero");
}

/// scale * (sum of coordinate moduli): the norm that majorizes any seminorm
/// whose basis maximum is `scale`.
template <FieldScalar Scalar>
double l1_majorant(const VectorX<Scalar>& a, double scale) {
    if (!(scale > 0.0) || std::isinf(scale)) {
        throw InvalidInput("l1_majorant: scale must be finite and > 0");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) acc += modulus(a(i));
    return scale * acc;
}

enum class BoundVerdict { Holds, Violated };

template <FieldScalar Scalar>
struct BoundsReport {
    double scale = 0.0;  // basis maximum of the functional under test
    long trials = 0;
    double max_ratio = 0.0;
    BoundVerdict verdict = BoundVerdict::Holds;
    std::optional<std::array<VectorX<Scalar>, 2>> witness;
};

/// Checks f(a) <= majorant(a) on random points. Requires a structurally
/// subadditive expression; the bound is a theorem for those.
template <FieldScalar Scalar>
BoundsReport<Scalar> check_majorization(const Functional<Scalar>& f, long trials,
                                        std::uint64_t seed, const TolerancePolicy& tol = {}) {
    if (trials < 1) throw InvalidInput("check_majorization: trials must be >= 1");
    if (!is_seminorm_fragment(f)) {
        throw InvalidInput("check_majorization: expression is not structurally subadditive");
    }
    tol.validate();
    const SpaceDescriptor<Scalar> space(f.dim(), tol);
    const double scale = basis_max(f, space);

    struct Chunk {
        double max_ratio = 0.0;
        long violating_trial = -1;
        VectorX<Scalar> witness;
    };
    const auto chunks = run_chunked(trials, [&](long begin, long end) {
        Chunk c;
        for (long trial = begin; trial < end; ++trial) {
            SampleStream stream(seed, static_cast<std::uint64_t>(trial));
            const VectorX<Scalar> a = stream.gaussian_vector<Scalar>(f.dim());
            const double lhs = f(a);
            const double rhs = l1_majorant(a, scale);
            if (rhs > tol.abs_tol) c.max_ratio = std::max(c.max_ratio, lhs / rhs);
            if (lhs > rhs + tol.margin(lhs, rhs)) {
                c.violating_trial = trial;
                c.witness = a;
                break;
            }
        }
        return c;
    });

    BoundsReport<Scalar> report;
    report.scale = scale;
    report.trials = trials;
    for (const auto& c : chunks) {
        report.max_ratio = std::max(report.max_ratio, c.max_ratio);
        if (c.violating_trial >= 0 && report.verdict == BoundVerdict::Holds) {
            report.verdict = BoundVerdict::Violated;
            report.witness = {c.witness, VectorX<Scalar>::Zero(f.dim())};
        }
    }
    return report;
}

/// Checks |f(a) - f(b)| <= majorant(a - b) on random pairs and along driven
/// convergent sequences. Non-subadditive expressions are accepted on purpose;
/// they are expected to report Violated with a replayable witness. Pair
/// sampling and the driven base points are aware of boost subspaces, where
/// the only violations of a boosted functional can occur.
template <FieldScalar Scalar>
BoundsReport<Scalar> check_lipschitz(const Functional<Scalar>& f, long trials, std::uint64_t seed,
                                     const TolerancePolicy& tol = {}) {
    if (trials < 1) throw InvalidInput("check_lipschitz: trials must be >= 1");
    tol.validate();
    const Eigen::Index n = f.dim();
    const SpaceDescriptor<Scalar> space(n, tol);
    const double scale = basis_max(f, space);
    const auto boosts = collect_boost_subspaces(f);

    struct Chunk {
        double max_ratio = 0.0;
        long violating_trial = -1;
        VectorX<Scalar> witness_a, witness_b;
    };
    const auto check_pair = [&](const VectorX<Scalar>& a, const VectorX<Scalar>& b, Chunk& c,
                                long trial) {
        const double va = f(a);
        const double vb = f(b);
        const double lhs = std::abs(va - vb);
        const double rhs = l1_majorant((a - b).eval(), scale);
        if (rhs > tol.abs_tol) c.max_ratio = std::max(c.max_ratio, lhs / rhs);
        if (lhs > rhs + tol.margin(lhs, rhs)) {
            if (c.violating_trial < 0) {
                c.violating_trial = trial;
                c.witness_a = a;
                c.witness_b = b;
            }
            return true;
        }
        return false;
    };

    const auto chunks = run_chunked(trials, [&](long begin, long end) {
        Chunk c;
        for (long trial = begin; trial < end; ++trial) {
            SampleStream stream(seed, static_cast<std::uint64_t>(trial));
            VectorX<Scalar> a, b;
            const bool structured = !boosts.empty() && trial % 4 == 3;
            if (structured) {
                const auto& sub = boosts[static_cast<std::size_t>(trial / 4) % boosts.size()];
                a = VectorX<Scalar>::Zero(n);
                for (Eigen::Index j = 0; j < sub.dim(); ++j) {
                    a += sub.basis().col(j) * stream.template random_scalar<Scalar>();
                }
                const double eps = stream.log_uniform(1e-6, 1e-1) * (1.0 + a.norm());
                b = a + eps * stream.unit_vector<Scalar>(n);
            } else {
                a = stream.gaussian_vector<Scalar>(n);
                b = stream.gaussian_vector<Scalar>(n);
            }
            if (check_pair(a, b, c, trial)) break;
        }
        return c;
    });

    BoundsReport<Scalar> report;
    report.scale = scale;
    report.trials = trials;
    for (const auto& c : chunks) {
        report.max_ratio = std::max(report.max_ratio, c.max_ratio);
        if (c.violating_trial >= 0 && report.verdict == BoundVerdict::Holds) {
            report.verdict = BoundVerdict::Violated;
            report.witness = {c.witness_a, c.witness_b};
        }
    }

    // Driven convergent sequences a_j -> base, checked at every step.
    std::vector<VectorX<Scalar>> bases;
    SampleStream base_stream(derive_seed(seed, 0x5e90ULL));
    for (int i = 0; i < 4; ++i) bases.push_back(base_stream.gaussian_vector<Scalar>(n));
    for (const auto& sub : boosts) {
        VectorX<Scalar> on_sub = VectorX<Scalar>::Zero(n);
        for (Eigen::Index j = 0; j < sub.dim(); ++j) {
            on_sub += sub.basis().col(j) * base_stream.template random_scalar<Scalar>();
        }
        bases.push_back(std::move(on_sub));
    }
    Chunk seq;
    long seq_trial = 0;
    for (const auto& base : bases) {
        for (int rep = 0; rep < 2; ++rep) {
            const VectorX<Scalar> dir = base_stream.unit_vector<Scalar>(n);
            for (int j = 1; j <= 8; ++j) {
                const double t = std::pow(10.0, -j);
                const VectorX<Scalar> approaching = base + t * dir;
                check_pair(approaching, base, seq, seq_trial++);
            }
        }
    }
    report.max_ratio = std::max(report.max_ratio, seq.max_ratio);
    if (seq.violating_trial >= 0 && report.verdict == BoundVerdict::Holds) {
        report.verdict = BoundVerdict::Violated;
        report.witness = {seq.witness_a, seq.witness_b};
    }
    return report;
}

// ---------------------------------------------------------------------------
// Equivalence constants
// ---------------------------------------------------------------------------

/// Search budget; an explicit type so runs are reproducible.
struct OptBudget {
    int starts = 64;
    long max_iters = 10000;  // objective evaluations per start
    long validation_samples = 100000;
    std::uint64_t seed = 0;
};

enum class EquivMethod { SphereMax, ViaN1 };

template <FieldScalar Scalar>
struct EquivalenceConstants {
    double tau = 0.0;                ///< best found left constant: f <= tau * reference
    std::optional<double> mu, nu;    ///< two-sided constants when computed
    VectorX<Scalar> argmax;          ///< sphere point achieving tau (or nu)
    bool certified = false;          ///< search result, not a certified bound
    bool zero_functional = false;    ///< the bounded functional is identically zero
};

namespace detail {

template <FieldScalar Scalar>
constexpr Eigen::Index real_coord_count(Eigen::Index n) {
    return is_complex_scalar_v<Scalar> ? 2 * n : n;
}

template <FieldScalar Scalar>
void nudge_real_coord(VectorX<Scalar>& v, Eigen::Index idx, double delta) {
    if constexpr (is_complex_scalar_v<Scalar>) {
        v(idx / 2) += (idx % 2 == 0) ? Scalar(delta, 0.0) : Scalar(0.0, delta);
    } else {
        v(idx) += delta;
    }
}

template <FieldScalar Scalar>
bool lex_less(const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if constexpr (is_complex_scalar_v<Scalar>) {
            if (a(i).real() != b(i).real()) return a(i).real() < b(i).real();
            if (a(i).imag() != b(i).imag()) return a(i).imag() < b(i).imag();
        } else {
            if (a(i) != b(i)) return a(i) < b(i);
        }
    }
    return false;
}

template <FieldScalar Scalar>
struct SpherePoint {
    double value = 0.0;
    VectorX<Scalar> point;
};

/// Multi-start projected coordinate search over {x : normalizer(x) = 1}.
/// Starts run in parallel; the winner is a deterministic reduction (best
/// value, ties broken by lexicographically smallest point).
template <FieldScalar Scalar, class Objective, class Normalizer>
SpherePoint<Scalar> sphere_search(Eigen::Index n, Objective&& objective, Normalizer&& normalizer,
                                  const OptBudget& budget, std::uint64_t seed, bool maximize) {
    const auto better = [maximize](double candidate, double incumbent) {
        return maximize ? candidate > incumbent : candidate < incumbent;
    };

    const auto one_start = [&](long start) {
        SampleStream stream(seed, static_cast<std::uint64_t>(start));
        VectorX<Scalar> x;
        double norm_value = 0.0;
        do {
            x = stream.gaussian_vector<Scalar>(n);
            norm_value = normalizer(x);
        } while (!(norm_value > 1e-300));
        x /= Scalar(norm_value);

        double value = objective(x);
        long evals = 1;
        double step = 0.1;
        const Eigen::Index coords = real_coord_count<Scalar>(n);
        while (step >= 1e-10 && evals < budget.max_iters) {
            bool improved = false;
            for (Eigen::Index idx = 0; idx < coords && evals < budget.max_iters; ++idx) {
                for (const double delta : {step, -step}) {
                    VectorX<Scalar> y = x;
                    nudge_real_coord(y, idx, delta);
                    const double m = normalizer(y);
                    if (!(m > 1e-300)) continue;
                    y /= Scalar(m);
                    const double v = objective(y);
                    ++evals;
                    if (better(v, value)) {
                        x = std::move(y);
                        value = v;
                        improved = true;
                        break;
                    }
                    if (evals >= budget.max_iters) break;
                }
            }
            if (!improved) step *= 0.5;
        }
        return SpherePoint<Scalar>{value, std::move(x)};
    };

    const auto starts = run_chunked(static_cast<long>(budget.starts), [&](long begin, long end) {
        std::vector<SpherePoint<Scalar>> local;
        for (long s = begin; s < end; ++s) local.push_back(one_start(s));
        return local;
    });

    SpherePoint<Scalar> best;
    bool first = true;
    for (const auto& chunk : starts) {
        for (const auto& candidate : chunk) {
            if (first || better(candidate.value, best.value) ||
                (candidate.value == best.value && lex_less(candidate.point, best.point))) {
                best = candidate;
                first = false;
            }
        }
    }
    return best;
}

/// true when the functional provably has no nonzero zero: via the structural
/// kernel where computable, otherwise by recursion over the variants.
template <FieldScalar Scalar>
bool definitely_positive_definite(const Functional<Scalar>& f) {
    const SpaceDescriptor<Scalar> space(f.dim());
    if (auto kernel = try_kernel_basis(f, space)) return kernel->dim() == 0;
    switch (f.kind()) {
        case ExprKind::PNorm:
            return true;  // any positive exponent
        case ExprKind::SubspaceBoost:
            return definitely_positive_definite(
                f.template as<SubspaceBoostNode<Scalar>>().inner);
        case ExprKind::Scale: {
            const auto& node = f.template as<ScaleNode<Scalar>>();
            return node.c > 0.0 && definitely_positive_definite(node.inner);
        }
        case ExprKind::Sum: {
            const auto& terms = f.template as<SumNode<Scalar>>().terms;
            return std::any_of(terms.begin(), terms.end(),
                               [](const auto& t) { return definitely_positive_definite(t); });
        }
        case ExprKind::Max: {
            const auto& terms = f.template as<MaxNode<Scalar>>().terms;
            return std::any_of(terms.begin(), terms.end(),
                               [](const auto& t) { return definitely_positive_definite(t); });
        }
        case ExprKind::MatrixPrecompose: {
            const auto& node = f.template as<MatrixPrecomposeNode<Scalar>>();
            if (!definitely_positive_definite(node.inner)) return false;
            return nullspace(node.a).dim() == 0;
        }
        default:
            return false;
    }
}

template <FieldScalar Scalar>
bool is_structural_norm(const Functional<Scalar>& f) {
    if (!is_seminorm_fragment(f)) return false;
    const SpaceDescriptor<Scalar> space(f.dim());
    const auto kernel = try_kernel_basis(f, space);
    return kernel.has_value() && kernel->dim() == 0;
}

/// Validation sampling: folds every sampled sphere ratio into the running
/// extremum, deterministically.
template <FieldScalar Scalar, class Numerator, class Normalizer>
void fold_validation(Eigen::Index n, Numerator&& numerator, Normalizer&& normalizer,
                     const OptBudget& budget, std::uint64_t seed, SpherePoint<Scalar>& hi,
                     SpherePoint<Scalar>* lo) {
    struct Extremes {
        SpherePoint<Scalar> hi{-1.0, {}};
        SpherePoint<Scalar> lo{0.0, {}};
        bool any = false;
    };
    const auto chunks = run_chunked(budget.validation_samples, [&](long begin, long end) {
        Extremes e;
        for (long i = begin; i < end; ++i) {
            SampleStream stream(seed, static_cast<std::uint64_t>(i));
            VectorX<Scalar> a = stream.gaussian_vector<Scalar>(n);
            const double m = normalizer(a);
            if (!(m > 1e-300)) continue;
            a /= Scalar(m);
            const double ratio = numerator(a);
            if (!e.any || ratio > e.hi.value) e.hi = {ratio, a};
            if (!e.any || ratio < e.lo.value) e.lo = {ratio, a};
            e.any = true;
        }
        return e;
    });
    for (const auto& e : chunks) {
        if (!e.any) continue;
        if (e.hi.value > hi.value) hi = e.hi;
        if (lo != nullptr && e.lo.value < lo->value) *lo = e.lo;
    }
}

}  // namespace detail

/// Best found constant tau with f <= tau * reference, together with the sphere
/// point achieving it. SphereMax maximizes f directly over the unit sphere of
/// the reference; ViaN1 maximizes the scaled-l1 majorant of f instead, giving
/// a valid but generally looser constant.
template <FieldScalar Scalar>
EquivalenceConstants<Scalar> left_equivalence(const Functional<Scalar>& f,
                                              const Functional<Scalar>& reference,
                                              EquivMethod method, const OptBudget& budget = {}) {
    if (f.dim() != reference.dim()) throw InvalidInput("left_equivalence: dimension mismatch");
    if (!detail::is_structural_norm(reference)) {
        throw InvalidInput("left_equivalence: reference must be a norm");
    }
    const Eigen::Index n = f.dim();
    const SpaceDescriptor<Scalar> space(n);
    const auto norm_ref = [&reference](const VectorX<Scalar>& x) { return reference(x); };

    EquivalenceConstants<Scalar> result;

    const auto kernel = try_kernel_basis(f, space);
    if (kernel.has_value() && kernel->dim() == n) {
        VectorX<Scalar> e1 = VectorX<Scalar>::Zero(n);
        e1(0) = Scalar(1);
        result.tau = 0.0;
        result.argmax = e1 / Scalar(reference(e1));
        result.zero_functional = true;
        return result;
    }

    detail::SpherePoint<Scalar> best;
    const std::uint64_t search_seed = derive_seed(budget.seed, 0x0A11ULL);
    const std::uint64_t validation_seed = derive_seed(budget.seed, 0x0B22ULL);
    if (method == EquivMethod::SphereMax) {
        best = detail::sphere_search<Scalar>(
            n, [&f](const VectorX<Scalar>& x) { return f(x); }, norm_ref, budget, search_seed,
            /*maximize=*/true);
        detail::fold_validation<Scalar>(
            n, [&f](const VectorX<Scalar>& x) { return f(x); }, norm_ref, budget, validation_seed,
            best, nullptr);
    } else {
        const double scale = basis_max(f, space);  // throws ZeroSeminorm only if f == 0
        const auto majorant = [scale](const VectorX<Scalar>& x) { return l1_majorant(x, scale); };
        best = detail::sphere_search<Scalar>(n, majorant, norm_ref, budget, search_seed,
                                             /*maximize=*/true);
        detail::fold_validation<Scalar>(n, majorant, norm_ref, budget, validation_seed, best,
                                        nullptr);
    }

    result.tau = best.value;
    result.argmax = best.point;
    if (result.tau <= space.tol().abs_tol) {
        // Not structurally recognizable as zero, but zero everywhere we looked.
        result.tau = 0.0;
        result.zero_functional = true;
    }
    return result;
}

/// Two-sided constants mu, nu with mu * f <= g <= nu * f, extremized over the
/// f-unit sphere. Both functionals must be continuity-safe; f must be
/// positive-definite so the sphere is well defined.
template <FieldScalar Scalar>
EquivalenceConstants<Scalar> two_sided_equivalence(const Functional<Scalar>& f,
                                                   const Functional<Scalar>& g,
                                                   const OptBudget& budget = {}) {
    if (f.dim() != g.dim()) throw InvalidInput("two_sided_equivalence: dimension mismatch");
    if (!is_continuity_safe(f) || !is_continuity_safe(g)) {
        throw InvalidInput("two_sided_equivalence: functionals must be continuity-safe");
    }
    if (!detail::definitely_positive_definite(f)) {
        throw InvalidInput("two_sided_equivalence: f must have a trivial kernel");
    }
    const Eigen::Index n = f.dim();
    const auto norm_f = [&f](const VectorX<Scalar>& x) { return f(x); };
    const auto value_g = [&g](const VectorX<Scalar>& x) { return g(x); };

    const std::uint64_t hi_seed = derive_seed(budget.seed, 0x0A11ULL);
    const std::uint64_t lo_seed = derive_seed(budget.seed, 0x0A12ULL);
    const std::uint64_t validation_seed = derive_seed(budget.seed, 0x0B22ULL);

    auto hi = detail::sphere_search<Scalar>(n, value_g, norm_f, budget, hi_seed, /*maximize=*/true);
    auto lo = detail::sphere_search<Scalar>(n, value_g, norm_f, budget, lo_seed, /*maximize=*/false);
    detail::fold_validation<Scalar>(n, value_g, norm_f, budget, validation_seed, hi, &lo);

    EquivalenceConstants<Scalar> result;
    result.mu = lo.value;
    result.nu = hi.value;
    result.tau = hi.value;
    result.argmax = hi.point;
    return result;
}

}  // namespace normlab
