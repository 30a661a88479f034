// oracles.hpp - slow, independent reference implementations for tests
//
// Each oracle recomputes a library quantity from its definition with plain
// loops, without calling the code under test.

#pragma once

#include "afdm/types.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using afdm::CMatrix;
using afdm::Complex;
using afdm::CVector;

inline Complex expj(long double phase_cycles) {
    const long double two_pi = 6.283185307179586476925286766559L;
    const long double x = two_pi * phase_cycles;
    return {static_cast<double>(std::cos(x)), static_cast<double>(std::sin(x))};
}

// A[m][k] = exp(-j 2 pi (c2 m^2 + m k / n + c1 k^2)) / sqrt(n)
inline CMatrix daft_matrix(int n, double c1, double c2) {
    CMatrix a(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) {
            const long double ph = static_cast<long double>(c2) * m * m + static_cast<long double>(m) * k / n +
                                   static_cast<long double>(c1) * k * k;
            a(m, k) = expj(-ph) / std::sqrt(static_cast<double>(n));
        }
    return a;
}

inline CMatrix dft_matrix(int n) {
    CMatrix f(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k) f(m, k) = expj(-static_cast<long double>(m) * k / n) / std::sqrt(static_cast<double>(n));
    return f;
}

inline double sinc_pi(long double f) {
    if (f == 0.0L) return 1.0;
    const long double x = 3.141592653589793238462643383279L * f;
    return static_cast<double>(std::sin(x) / x);
}

// Accumulates every transmitted sample s in [-n_cpp, n) onto the data index
// it carries, (s mod n), instead of using the closed fold rule.
inline CMatrix path_matrix(int n, int n_cpp, double scale, double delay, double dfs) {
    CMatrix h = CMatrix::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        const Complex rot = expj(static_cast<long double>(dfs) * m);
        for (int s = -n_cpp; s < n; ++s) {
            const int col = ((s % n) + n) % n;
            h(m, col) += sinc_pi(static_cast<long double>(scale) * m - delay - s) * rot;
        }
    }
    return h;
}

// H_bar[p][q] = sum_m sum_n A[p][m] H[m][n] conj(A[q][n]), summed term by term.
inline CMatrix conjugate_quadruple_sum(const CMatrix& a, const CMatrix& h) {
    const Eigen::Index n = a.rows();
    CMatrix out(n, n);
    for (Eigen::Index p = 0; p < n; ++p)
        for (Eigen::Index q = 0; q < n; ++q) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index m = 0; m < n; ++m)
                for (Eigen::Index k = 0; k < n; ++k) acc += a(p, m) * h(m, k) * std::conj(a(q, k));
            out(p, q) = acc;
        }
    return out;
}

// Eigenvalues of the explicitly formed Gram matrix, descending, via the
// general complex eigen-solver.
inline std::vector<double> gram_eigenvalues(const CMatrix& m) {
    const Eigen::Index p = m.cols();
    CMatrix g(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) {
            Complex acc{0.0, 0.0};
            for (Eigen::Index r = 0; r < m.rows(); ++r) acc += std::conj(m(r, i)) * m(r, j);
            g(i, j) = acc;
        }
    Eigen::ComplexEigenSolver<CMatrix> es(g);
    std::vector<double> ev;
    for (Eigen::Index i = 0; i < p; ++i) ev.push_back(es.eigenvalues()[i].real());
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

inline double pairwise_coherence(const CMatrix& phi) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < phi.cols(); ++i)
        for (Eigen::Index j = 0; j < phi.cols(); ++j) {
            if (i == j) continue;
            Complex ip{0.0, 0.0};
            double ni = 0.0, nj = 0.0;
            for (Eigen::Index r = 0; r < phi.rows(); ++r) {
                ip += std::conj(phi(r, i)) * phi(r, j);
                ni += std::norm(phi(r, i));
                nj += std::norm(phi(r, j));
            }
            best = std::max(best, std::abs(ip) / std::sqrt(ni * nj));
        }
    return best;
}

// (H^H H + I/snr)^{-1} H^H z with an explicit inverse.
inline CVector mmse_normal_equations(const CMatrix& h, const CVector& z, double snr) {
    const CMatrix hh = h.adjoint();
    CMatrix g = hh * h;
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, i) += 1.0 / snr;
    return g.fullPivLu().inverse() * (hh * z);
}

// Index of the nearest unit-energy QPSK point (b0 b1 = 00, 01, 10, 11).
inline int nearest_qpsk(Complex y) {
    const double r = 1.0 / std::sqrt(2.0);
    const Complex pts[4] = {{r, r}, {r, -r}, {-r, r}, {-r, -r}};
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (std::abs(y - pts[i]) < std::abs(y - pts[best])) best = i;
    return best;
}

}  // namespace oracle
