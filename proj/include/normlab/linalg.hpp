// Field-generic dense vectors, working bases, orthonormal subspaces, and
// tolerance-aware rank/nullspace computations. Dense storage and the SVD come
// from Eigen; rank decisions use a cutoff relative to the largest singular
// value so they stay stable under scaling.

#pragma once

#include <Eigen/Dense>
#include <utility>

#include "normlab/errors.hpp"
#include "normlab/scalar.hpp"
#include "normlab/tolerance.hpp"

namespace normlab {

template <FieldScalar Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <FieldScalar Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Number of singular values above rank_tol * (largest singular value).
template <FieldScalar Scalar>
Eigen::Index numerical_rank(const MatrixX<Scalar>& a, const TolerancePolicy& tol = {}) {
    tol.validate();
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    const double cutoff = tol.rank_tol * sv(0);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Near-dependent
/// columns (residual below drop_tol relative to the original column) are
/// dropped; the result has orthonormal columns spanning the input span.
template <FieldScalar Scalar>
MatrixX<Scalar> orthonormalize(const MatrixX<Scalar>& vectors, double drop_tol = 1e-12) {
    const Eigen::Index n = vectors.rows();
    MatrixX<Scalar> q(n, vectors.cols());
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
        VectorX<Scalar> v = vectors.col(j);
        const double original = v.norm();
        if (original <= 0.0) continue;
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < kept; ++i) {
                v -= q.col(i) * q.col(i).dot(v);
            }
        }
        const double remaining = v.norm();
        if (remaining <= drop_tol * original) continue;
        q.col(kept++) = v / remaining;
    }
    q.conservativeResize(Eigen::NoChange, kept);
    return q;
}

template <FieldScalar Scalar>
class Subspace;

/// A finite-dimensional coefficient space: field (the Scalar parameter),
/// dimension, working basis, and the tolerance policy every downstream
/// comparison uses.
///
/// All library operations act on coordinate vectors relative to the working
/// basis. A nonstandard basis only matters at the boundary: ambient vectors
/// are converted to working coordinates once, via to_coords.
template <FieldScalar Scalar>
class SpaceDescriptor {
public:
    explicit SpaceDescriptor(Eigen::Index dim, TolerancePolicy tol = {})
        : dim_(dim), tol_(tol), standard_(true) {
        tol_.validate();
        if (dim < 1) throw InvalidInput("SpaceDescriptor: dim must be >= 1");
    }

    /// Columns of `basis` are the basis vectors, expressed in ambient
    /// coordinates. They must be linearly independent.
    SpaceDescriptor(MatrixX<Scalar> basis, TolerancePolicy tol = {})
        : dim_(basis.cols()), tol_(tol), standard_(false), basis_(std::move(basis)) {
        tol_.validate();
        if (dim_ < 1) throw InvalidInput("SpaceDescriptor: dim must be >= 1");
        if (basis_.rows() != dim_) {
            throw InvalidInput("SpaceDescriptor: basis must be square (n vectors of length n)");
        }
        if (numerical_rank(basis_, tol_) != dim_) {
            throw InvalidInput("SpaceDescriptor: basis vectors are linearly dependent");
        }
        solver_ = basis_.colPivHouseholderQr();
        standard_ = basis_.isIdentity(0.0);
    }

    [[nodiscard]] Eigen::Index dim() const { return dim_; }
    [[nodiscard]] const TolerancePolicy& tol() const { return tol_; }
    [[nodiscard]] static Field field() { return field_of<Scalar>(); }
    [[nodiscard]] bool standard_basis() const { return standard_; }

    [[nodiscard]] MatrixX<Scalar> basis() const {
        if (standard_ && basis_.size() == 0) return MatrixX<Scalar>::Identity(dim_, dim_);
        return basis_;
    }

    /// Ambient vector -> coordinates relative to the working basis.
    [[nodiscard]] VectorX<Scalar> to_coords(const VectorX<Scalar>& ambient) const {
        if (ambient.size() != dim_) throw InvalidInput("to_coords: dimension mismatch");
        if (standard_) return ambient;
        return solver_.solve(ambient);
    }

    /// Working-basis coordinates -> ambient vector.
    [[nodiscard]] VectorX<Scalar> from_coords(const VectorX<Scalar>& coords) const {
        if (coords.size() != dim_) throw InvalidInput("from_coords: dimension mismatch");
        if (standard_) return coords;
        return basis_ * coords;
    }

private:
    Eigen::Index dim_;
    TolerancePolicy tol_;
    bool standard_;
    MatrixX<Scalar> basis_;
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> solver_;
};

/// A linear subspace stored as an orthonormal basis (possibly empty, meaning
/// the zero subspace). Membership is a projection-residual test against the
/// stored tolerance policy.
template <FieldScalar Scalar>
class Subspace {
public:
    /// The zero subspace of an n-dimensional ambient space.
    explicit Subspace(Eigen::Index ambient_dim, TolerancePolicy tol = {})
        : ambient_(ambient_dim), basis_(ambient_dim, 0), tol_(tol) {
        tol_.validate();
        if (ambient_dim < 1) throw InvalidInput("Subspace: ambient dim must be >= 1");
    }

    /// Span of the given columns (orthonormalized; dependent columns dropped).
    static Subspace span(const MatrixX<Scalar>& vectors, TolerancePolicy tol = {}) {
        if (vectors.rows() < 1) throw InvalidInput("Subspace::span: ambient dim must be >= 1");
        Subspace s(vectors.rows(), tol);
        s.basis_ = orthonormalize(vectors);
        return s;
    }

    /// Wraps columns that are already orthonormal (validated against tol).
    static Subspace from_orthonormal(MatrixX<Scalar> basis, TolerancePolicy tol = {}) {
        if (basis.rows() < 1) throw InvalidInput("Subspace: ambient dim must be >= 1");
        Subspace s(basis.rows(), tol);
        MatrixX<Scalar> gram = basis.adjoint() * basis;
        gram -= MatrixX<Scalar>::Identity(basis.cols(), basis.cols());
        if (gram.size() > 0 && gram.cwiseAbs().maxCoeff() > 1e-8) {
            throw InvalidInput("Subspace: basis columns are not orthonormal");
        }
        s.basis_ = std::move(basis);
        return s;
    }

    [[nodiscard]] Eigen::Index ambient_dim() const { return ambient_; }
    [[nodiscard]] Eigen::Index dim() const { return basis_.cols(); }
    [[nodiscard]] const MatrixX<Scalar>& basis() const { return basis_; }
    [[nodiscard]] const TolerancePolicy& tol() const { return tol_; }

    /// Orthogonal projection onto the subspace.
    [[nodiscard]] VectorX<Scalar> project(const VectorX<Scalar>& x) const {
        check_dim(x);
        if (dim() == 0) return VectorX<Scalar>::Zero(ambient_);
        return basis_ * (basis_.adjoint() * x);
    }

    /// Euclidean distance from x to the subspace.
    [[nodiscard]] double residual(const VectorX<Scalar>& x) const {
        return (x - project(x)).norm();
    }

    /// true iff ||x - proj(x)|| <= abs_tol + rel_tol * ||x||.
    [[nodiscard]] bool contains(const VectorX<Scalar>& x) const {
        return residual(x) <= tol_.abs_tol + tol_.rel_tol * x.norm();
    }

private:
    void check_dim(const VectorX<Scalar>& x) const {
        if (x.size() != ambient_) throw InvalidInput("Subspace: vector/ambient dimension mismatch");
    }

    Eigen::Index ambient_;
    MatrixX<Scalar> basis_;
    TolerancePolicy tol_;
};

/// Orthonormal basis of {x : a x = 0}, with the numerical kernel decided by
/// singular values below rank_tol * (largest singular value).
template <FieldScalar Scalar>
Subspace<Scalar> nullspace(const MatrixX<Scalar>& a, const TolerancePolicy& tol = {}) {
    tol.validate();
    const Eigen::Index n = a.cols();
    if (n < 1) throw InvalidInput("nullspace: matrix must have at least one column");
    if (a.rows() == 0) {
        return Subspace<Scalar>::from_orthonormal(MatrixX<Scalar>::Identity(n, n), tol);
    }
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double largest = sv.size() > 0 ? sv(0) : 0.0;
    Eigen::Index rank = 0;
    if (largest > 0.0) {
        const double cutoff = tol.rank_tol * largest;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff) ++rank;
        }
    }
    const MatrixX<Scalar> v = svd.matrixV();
    return Subspace<Scalar>::from_orthonormal(v.rightCols(n - rank), tol);
}

/// Two subspaces agree iff they have equal dimension and each basis vector of
/// one passes the membership test of the other.
template <FieldScalar Scalar>
bool same_subspace(const Subspace<Scalar>& a, const Subspace<Scalar>& b) {
    if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) return false;
    for (Eigen::Index j = 0; j < a.dim(); ++j) {
        if (!b.contains(a.basis().col(j))) return false;
    }
    for (Eigen::Index j = 0; j < b.dim(); ++j) {
        if (!a.contains(b.basis().col(j))) return false;
    }
    return true;
}

}  // namespace normlab
