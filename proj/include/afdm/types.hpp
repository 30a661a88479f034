// types.hpp - shared numeric types and random streams
//
// Dense complex linear algebra is Eigen throughout; N is at most a few
// hundred, so every operator is materialized as an explicit matrix.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace afdm {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

using Rng = std::mt19937_64;

// Independent stream for (seed, stream) so that trial t of a Monte-Carlo run
// draws the same numbers no matter which worker executes it.
inline Rng make_substream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return Rng(seq);
}

// Circularly-symmetric complex Gaussian with E|w|^2 = variance.
inline Complex complex_gaussian(Rng& rng, double variance) {
    std::normal_distribution<double> nd(0.0, std::sqrt(variance / 2.0));
    const double re = nd(rng);
    const double im = nd(rng);
    return {re, im};
}

inline CVector complex_gaussian_vector(Rng& rng, Eigen::Index n, double variance) {
    CVector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w[i] = complex_gaussian(rng, variance);
    return w;
}

// Thrown when an estimator cannot decide between grid cells.
class AmbiguityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a linear solve cannot be completed.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace afdm
