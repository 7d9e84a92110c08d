// Deterministic random sampling.
//
// Every randomized operation in the library draws from a SampleStream derived
// from (seed, stream index) by counter, never from shared mutable state, so
// trials can run in any order or in parallel and still reproduce the
// sequential result bit for bit. The generator and all distributions are
// implemented here because the standard distributions are not guaranteed to
// produce identical sequences across platforms or library versions.

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "normlab/scalar.hpp"

namespace normlab {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// xoshiro256** seeded through splitmix64.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = detail::splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }

    result_type operator()() {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

private:
    std::array<std::uint64_t, 4> state_{};
};

/// Mixes a base seed with a stream index into a fresh sub-seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t sm = seed ^ (0x9e3779b97f4a7c15ULL + index * 0xd1b54a32d192ed03ULL);
    detail::splitmix64(sm);
    return detail::splitmix64(sm);
}

/// One independent sampling stream; cheap to construct per trial.
class SampleStream {
public:
    explicit SampleStream(std::uint64_t seed) : engine_(seed) {}
    SampleStream(std::uint64_t seed, std::uint64_t index) : engine_(derive_seed(seed, index)) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool coin() { return (engine_() & 1ULL) != 0; }

    /// Standard normal via Box-Muller (the spare is cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Magnitude log-uniform over [lo, hi].
    double log_uniform(double lo, double hi) {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Random field scalar with the given modulus: a sign flip over the reals,
    /// a uniform phase over the complex numbers.
    template <FieldScalar Scalar>
    Scalar scalar_with_modulus(double magnitude) {
        if constexpr (is_complex_scalar_v<Scalar>) {
            const double phase = uniform(0.0, 2.0 * std::numbers::pi);
            return Scalar(magnitude * std::cos(phase), magnitude * std::sin(phase));
        } else {
            return coin() ? magnitude : -magnitude;
        }
    }

    /// Scalar with log-uniform modulus in [1e-3, 1e3] and random sign/phase.
    template <FieldScalar Scalar>
    Scalar random_scalar() {
        return scalar_with_modulus<Scalar>(log_uniform(1e-3, 1e3));
    }

    /// Rotation-invariant random vector (independent standard Gaussian
    /// coordinates; circularly symmetric in the complex case).
    template <FieldScalar Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> gaussian_vector(Eigen::Index n) {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if constexpr (is_complex_scalar_v<Scalar>) {
                v(i) = Scalar(normal(), normal()) * std::numbers::sqrt2 / 2.0;
            } else {
                v(i) = normal();
            }
        }
        return v;
    }

    /// Gaussian vector normalized to unit Euclidean length (re-drawn in the
    /// measure-zero degenerate case).
    template <FieldScalar Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> unit_vector(Eigen::Index n) {
        for (;;) {
            auto v = gaussian_vector<Scalar>(n);
            const double len = v.norm();
            if (len > 1e-30) return (v / len).eval();
        }
    }

private:
    Xoshiro256 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace normlab
