// Compositional, evaluable descriptions of candidate norms, seminorms, and
// subnorms. Every variant is absolutely homogeneous by construction; the
// p-norms with exponent below 1 and the subspace boost deliberately break
// subadditivity, giving the rest of the library nontrivial subnorm inputs.
//
// Expression trees are immutable and cheap to copy (shared structure);
// evaluation is a pure function of the input vector.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "normlab/errors.hpp"
#include "normlab/linalg.hpp"
#include "normlab/scalar.hpp"

namespace normlab {

enum class ExprKind {
    PNorm,
    MatrixPrecompose,
    Scale,
    Sum,
    Max,
    AbsLinear,
    SubspaceBoost,
    OneDimWeight,
};

template <FieldScalar Scalar>
class Functional;

namespace detail {

template <FieldScalar Scalar>
struct ExprNode {
    virtual ~ExprNode() = default;
    [[nodiscard]] virtual ExprKind kind() const = 0;
    [[nodiscard]] virtual Eigen::Index dim() const = 0;
    [[nodiscard]] virtual double evaluate(const VectorX<Scalar>& x) const = 0;
};

/// (sum_i |x_i|^p)^(1/p); p = +infinity means max of moduli. Computed against
/// the largest modulus so large exponents cannot overflow.
template <FieldScalar Scalar>
struct PNormNode final : ExprNode<Scalar> {
    Eigen::Index n;
    double p;

    PNormNode(Eigen::Index n_, double p_) : n(n_), p(p_) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::PNorm; }
    [[nodiscard]] Eigen::Index dim() const override { return n; }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        if (std::isinf(p)) {
            double best = 0.0;
            for (Eigen::Index i = 0; i < x.size(); ++i) best = std::max(best, modulus(x(i)));
            return best;
        }
        if (p == 2.0) return x.norm();
        if (p == 1.0) return x.template lpNorm<1>();
        double peak = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) peak = std::max(peak, modulus(x(i)));
        if (peak == 0.0) return 0.0;
        double acc = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(modulus(x(i)) / peak, p);
        return peak * std::pow(acc, 1.0 / p);
    }
};

template <FieldScalar Scalar>
struct MatrixPrecomposeNode final : ExprNode<Scalar> {
    MatrixX<Scalar> a;
    Functional<Scalar> inner;

    MatrixPrecomposeNode(MatrixX<Scalar> a_, Functional<Scalar> inner_)
        : a(std::move(a_)), inner(std::move(inner_)) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::MatrixPrecompose; }
    [[nodiscard]] Eigen::Index dim() const override { return a.cols(); }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        return inner.unchecked_evaluate(a * x);
    }
};

template <FieldScalar Scalar>
struct ScaleNode final : ExprNode<Scalar> {
    double c;
    Functional<Scalar> inner;

    ScaleNode(double c_, Functional<Scalar> inner_) : c(c_), inner(std::move(inner_)) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::Scale; }
    [[nodiscard]] Eigen::Index dim() const override { return inner.dim(); }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        return c * inner.unchecked_evaluate(x);
    }
};

template <FieldScalar Scalar>
struct SumNode final : ExprNode<Scalar> {
    std::vector<Functional<Scalar>> terms;

    explicit SumNode(std::vector<Functional<Scalar>> terms_) : terms(std::move(terms_)) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::Sum; }
    [[nodiscard]] Eigen::Index dim() const override { return terms.front().dim(); }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        double acc = 0.0;
        for (const auto& t : terms) acc += t.unchecked_evaluate(x);
        return acc;
    }
};

template <FieldScalar Scalar>
struct MaxNode final : ExprNode<Scalar> {
    std::vector<Functional<Scalar>> terms;

    explicit MaxNode(std::vector<Functional<Scalar>> terms_) : terms(std::move(terms_)) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::Max; }
    [[nodiscard]] Eigen::Index dim() const override { return terms.front().dim(); }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        double best = 0.0;
        for (const auto& t : terms) best = std::max(best, t.unchecked_evaluate(x));
        return best;
    }
};

/// |phi_1 x_1 + ... + phi_n x_n|: the modulus of a linear functional given by
/// its coefficients in the dual of the working basis (no conjugation).
template <FieldScalar Scalar>
struct AbsLinearNode final : ExprNode<Scalar> {
    VectorX<Scalar> phi;

    explicit AbsLinearNode(VectorX<Scalar> phi_) : phi(std::move(phi_)) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::AbsLinear; }
    [[nodiscard]] Eigen::Index dim() const override { return phi.size(); }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        const Scalar value = (phi.array() * x.array()).sum();
        return modulus(value);
    }
};

/// kappa * inner on the stored subspace, inner elsewhere. The membership test
/// uses the subspace's tolerance policy, so points within tolerance of the
/// subspace take the boosted branch.
template <FieldScalar Scalar>
struct SubspaceBoostNode final : ExprNode<Scalar> {
    Subspace<Scalar> w;
    double kappa;
    Functional<Scalar> inner;

    SubspaceBoostNode(Subspace<Scalar> w_, double kappa_, Functional<Scalar> inner_)
        : w(std::move(w_)), kappa(kappa_), inner(std::move(inner_)) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::SubspaceBoost; }
    [[nodiscard]] Eigen::Index dim() const override { return w.ambient_dim(); }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        const double base = inner.unchecked_evaluate(x);
        return w.contains(x) ? kappa * base : base;
    }
};

/// gamma * |x_1| on a one-dimensional space: the general form of a subnorm in
/// dimension one, with gamma its value on the unit coordinate vector.
template <FieldScalar Scalar>
struct OneDimWeightNode final : ExprNode<Scalar> {
    double gamma;

    explicit OneDimWeightNode(double gamma_) : gamma(gamma_) {}

    [[nodiscard]] ExprKind kind() const override { return ExprKind::OneDimWeight; }
    [[nodiscard]] Eigen::Index dim() const override { return 1; }

    [[nodiscard]] double evaluate(const VectorX<Scalar>& x) const override {
        return gamma * modulus(x(0));
    }
};

}  // namespace detail

/// Value-semantic handle to an immutable expression tree.
template <FieldScalar Scalar>
class Functional {
public:
    using Node = detail::ExprNode<Scalar>;

    [[nodiscard]] ExprKind kind() const { return node_->kind(); }
    [[nodiscard]] Eigen::Index dim() const { return node_->dim(); }

    /// Evaluates the tree at x. Always nonnegative; zero at the zero vector.
    double operator()(const VectorX<Scalar>& x) const {
        if (x.size() != dim()) throw InvalidInput("Functional: input dimension mismatch");
        return node_->evaluate(x);
    }

    /// Evaluation without the dimension check (hot path; shapes were validated
    /// at construction).
    [[nodiscard]] double unchecked_evaluate(const VectorX<Scalar>& x) const {
        return node_->evaluate(x);
    }

    template <class NodeType>
    [[nodiscard]] const NodeType& as() const {
        const auto* p = dynamic_cast<const NodeType*>(node_.get());
        if (p == nullptr) throw InvalidInput("Functional: node kind mismatch");
        return *p;
    }

    static Functional wrap(std::shared_ptr<const Node> node) { return Functional(std::move(node)); }

private:
    explicit Functional(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

// ---------------------------------------------------------------------------
// Factories (all shape and parameter validation happens here)
// ---------------------------------------------------------------------------

/// p-norm on an n-dimensional space. p in (0, 1) gives a homogeneous,
/// positive-definite functional that is not subadditive; p = infinity is the
/// max of moduli.
template <FieldScalar Scalar>
Functional<Scalar> pnorm(Eigen::Index n, double p) {
    if (n < 1) throw InvalidInput("pnorm: dim must be >= 1");
    if (std::isnan(p) || p <= 0.0) throw InvalidInput("pnorm: exponent must be positive");
    return Functional<Scalar>::wrap(std::make_shared<detail::PNormNode<Scalar>>(n, p));
}

template <FieldScalar Scalar>
Functional<Scalar> matrix_precompose(MatrixX<Scalar> a, Functional<Scalar> inner) {
    if (a.rows() < 1 || a.cols() < 1) throw InvalidInput("matrix_precompose: empty matrix");
    if (a.rows() != inner.dim()) {
        throw InvalidInput("matrix_precompose: matrix rows must match inner dimension");
    }
    return Functional<Scalar>::wrap(
        std::make_shared<detail::MatrixPrecomposeNode<Scalar>>(std::move(a), std::move(inner)));
}

template <FieldScalar Scalar>
Functional<Scalar> scale(double c, Functional<Scalar> inner) {
    if (std::isnan(c) || c < 0.0 || std::isinf(c)) {
        throw InvalidInput("scale: factor must be finite and >= 0");
    }
    return Functional<Scalar>::wrap(
        std::make_shared<detail::ScaleNode<Scalar>>(c, std::move(inner)));
}

namespace detail {
template <FieldScalar Scalar>
void check_terms(const std::vector<Functional<Scalar>>& terms, const char* what) {
    if (terms.empty()) throw InvalidInput(std::string(what) + ": needs at least one term");
    for (const auto& t : terms) {
        if (t.dim() != terms.front().dim()) {
            throw InvalidInput(std::string(what) + ": terms have mismatched dimensions");
        }
    }
}
}  // namespace detail

template <FieldScalar Scalar>
Functional<Scalar> sum_of(std::vector<Functional<Scalar>> terms) {
    detail::check_terms(terms, "sum_of");
    return Functional<Scalar>::wrap(std::make_shared<detail::SumNode<Scalar>>(std::move(terms)));
}

template <FieldScalar Scalar>
Functional<Scalar> max_of(std::vector<Functional<Scalar>> terms) {
    detail::check_terms(terms, "max_of");
    return Functional<Scalar>::wrap(std::make_shared<detail::MaxNode<Scalar>>(std::move(terms)));
}

template <FieldScalar Scalar>
Functional<Scalar> abs_linear(VectorX<Scalar> phi) {
    if (phi.size() < 1) throw InvalidInput("abs_linear: needs at least one coefficient");
    return Functional<Scalar>::wrap(std::make_shared<detail::AbsLinearNode<Scalar>>(std::move(phi)));
}

template <FieldScalar Scalar>
Functional<Scalar> subspace_boost(Subspace<Scalar> w, double kappa, Functional<Scalar> inner) {
    if (std::isnan(kappa) || kappa <= 1.0 || std::isinf(kappa)) {
        throw InvalidInput("subspace_boost: kappa must be finite and > 1");
    }
    if (w.ambient_dim() != inner.dim()) {
        throw InvalidInput("subspace_boost: subspace and inner dimensions differ");
    }
    return Functional<Scalar>::wrap(std::make_shared<detail::SubspaceBoostNode<Scalar>>(
        std::move(w), kappa, std::move(inner)));
}

template <FieldScalar Scalar>
Functional<Scalar> one_dim_weight(double gamma) {
    if (std::isnan(gamma) || gamma <= 0.0 || std::isinf(gamma)) {
        throw InvalidInput("one_dim_weight: gamma must be finite and > 0");
    }
    return Functional<Scalar>::wrap(std::make_shared<detail::OneDimWeightNode<Scalar>>(gamma));
}

/// The subnorm on a one-dimensional space taking the value gamma at a0:
/// evaluates to gamma * |alpha| at alpha * a0.
template <FieldScalar Scalar>
Functional<Scalar> one_dim_subnorm(double gamma, const VectorX<Scalar>& a0) {
    if (std::isnan(gamma) || gamma <= 0.0 || std::isinf(gamma)) {
        throw InvalidInput("one_dim_subnorm: gamma must be finite and > 0");
    }
    if (a0.size() != 1) throw InvalidInput("one_dim_subnorm: ambient space must be one-dimensional");
    const double base = modulus(a0(0));
    if (base <= 0.0) throw InvalidInput("one_dim_subnorm: a0 must be nonzero");
    return one_dim_weight<Scalar>(gamma / base);
}

// ---------------------------------------------------------------------------
// Structural predicates
// ---------------------------------------------------------------------------

/// true iff the tree is built only from variants that are subadditive by
/// construction (p-norms with p >= 1, matrix precompositions, scales, sums,
/// maxima, abs-linear functionals, one-dim weights).
template <FieldScalar Scalar>
bool is_seminorm_fragment(const Functional<Scalar>& f) {
    switch (f.kind()) {
        case ExprKind::PNorm:
            return f.template as<detail::PNormNode<Scalar>>().p >= 1.0;
        case ExprKind::MatrixPrecompose:
            return is_seminorm_fragment(f.template as<detail::MatrixPrecomposeNode<Scalar>>().inner);
        case ExprKind::Scale:
            return is_seminorm_fragment(f.template as<detail::ScaleNode<Scalar>>().inner);
        case ExprKind::Sum: {
            const auto& node = f.template as<detail::SumNode<Scalar>>();
            return std::all_of(node.terms.begin(), node.terms.end(),
                               [](const auto& t) { return is_seminorm_fragment(t); });
        }
        case ExprKind::Max: {
            const auto& node = f.template as<detail::MaxNode<Scalar>>();
            return std::all_of(node.terms.begin(), node.terms.end(),
                               [](const auto& t) { return is_seminorm_fragment(t); });
        }
        case ExprKind::AbsLinear:
        case ExprKind::OneDimWeight:
            return true;
        case ExprKind::SubspaceBoost:
            return false;
    }
    return false;
}

/// true iff no node in the tree is a subspace boost.
template <FieldScalar Scalar>
bool contains_boost(const Functional<Scalar>& f) {
    switch (f.kind()) {
        case ExprKind::SubspaceBoost:
            return true;
        case ExprKind::MatrixPrecompose:
            return contains_boost(f.template as<detail::MatrixPrecomposeNode<Scalar>>().inner);
        case ExprKind::Scale:
            return contains_boost(f.template as<detail::ScaleNode<Scalar>>().inner);
        case ExprKind::Sum: {
            const auto& node = f.template as<detail::SumNode<Scalar>>();
            return std::any_of(node.terms.begin(), node.terms.end(),
                               [](const auto& t) { return contains_boost(t); });
        }
        case ExprKind::Max: {
            const auto& node = f.template as<detail::MaxNode<Scalar>>();
            return std::any_of(node.terms.begin(), node.terms.end(),
                               [](const auto& t) { return contains_boost(t); });
        }
        default:
            return false;
    }
}

/// Boost subspaces appearing anywhere in the tree (used by samplers that must
/// exercise the branch structure).
template <FieldScalar Scalar>
void collect_boost_subspaces(const Functional<Scalar>& f, std::vector<Subspace<Scalar>>& out) {
    switch (f.kind()) {
        case ExprKind::SubspaceBoost: {
            const auto& node = f.template as<detail::SubspaceBoostNode<Scalar>>();
            out.push_back(node.w);
            collect_boost_subspaces(node.inner, out);
            return;
        }
        case ExprKind::MatrixPrecompose:
            // Boost subspaces of the inner functional live in the image space,
            // not the ambient space; they are not directly sampleable here.
            return;
        case ExprKind::Scale:
            collect_boost_subspaces(f.template as<detail::ScaleNode<Scalar>>().inner, out);
            return;
        case ExprKind::Sum:
            for (const auto& t : f.template as<detail::SumNode<Scalar>>().terms) {
                collect_boost_subspaces(t, out);
            }
            return;
        case ExprKind::Max:
            for (const auto& t : f.template as<detail::MaxNode<Scalar>>().terms) {
                collect_boost_subspaces(t, out);
            }
            return;
        default:
            return;
    }
}

template <FieldScalar Scalar>
std::vector<Subspace<Scalar>> collect_boost_subspaces(const Functional<Scalar>& f) {
    std::vector<Subspace<Scalar>> out;
    collect_boost_subspaces(f, out);
    return out;
}

/// true iff the tree has no boost over a proper nontrivial subspace anywhere.
/// Boosts over the zero subspace or the full space do not create jumps, so
/// they are allowed.
template <FieldScalar Scalar>
bool is_continuity_safe(const Functional<Scalar>& f) {
    switch (f.kind()) {
        case ExprKind::SubspaceBoost: {
            const auto& node = f.template as<detail::SubspaceBoostNode<Scalar>>();
            const bool proper = node.w.dim() > 0 && node.w.dim() < node.w.ambient_dim();
            return !proper && is_continuity_safe(node.inner);
        }
        case ExprKind::MatrixPrecompose:
            return is_continuity_safe(f.template as<detail::MatrixPrecomposeNode<Scalar>>().inner);
        case ExprKind::Scale:
            return is_continuity_safe(f.template as<detail::ScaleNode<Scalar>>().inner);
        case ExprKind::Sum: {
            const auto& node = f.template as<detail::SumNode<Scalar>>();
            return std::all_of(node.terms.begin(), node.terms.end(),
                               [](const auto& t) { return is_continuity_safe(t); });
        }
        case ExprKind::Max: {
            const auto& node = f.template as<detail::MaxNode<Scalar>>();
            return std::all_of(node.terms.begin(), node.terms.end(),
                               [](const auto& t) { return is_continuity_safe(t); });
        }
        default:
            return true;
    }
}

}  // namespace normlab
