// Scalar-field abstraction: the library is generic over real and complex
// coefficient fields, both backed by double precision.

#pragma once

#include <complex>
#include <type_traits>

namespace normlab {

enum class Field { Real, Complex };

template <class T>
struct is_complex_scalar : std::false_type {};

template <class T>
struct is_complex_scalar<std::complex<T>> : std::true_type {};

template <class T>
inline constexpr bool is_complex_scalar_v = is_complex_scalar<T>::value;

template <class Scalar>
concept FieldScalar =
    std::is_same_v<Scalar, double> || std::is_same_v<Scalar, std::complex<double>>;

template <FieldScalar Scalar>
constexpr Field field_of() {
    return is_complex_scalar_v<Scalar> ? Field::Complex : Field::Real;
}

/// Modulus of a scalar; |.| in the homogeneity axiom.
template <FieldScalar Scalar>
double modulus(const Scalar& a) {
    if constexpr (is_complex_scalar_v<Scalar>) {
        return std::abs(a);
    } else {
        return std::abs(a);
    }
}

}  // namespace normlab
