#include "afdm/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace afdm {

std::string to_string(WaveformKind kind) {
    switch (kind) {
        case WaveformKind::ofdm: return "ofdm";
        case WaveformKind::ocdm: return "ocdm";
        case WaveformKind::afdm: return "afdm";
    }
    return "unknown";
}

WaveformKind parse_waveform_kind(std::string_view name) {
    if (name == "ofdm") return WaveformKind::ofdm;
    if (name == "ocdm") return WaveformKind::ocdm;
    if (name == "afdm") return WaveformKind::afdm;
    throw std::invalid_argument("unknown waveform '" + std::string(name) + "'");
}

int WaveformParams::chirp_steps() const {
    return static_cast<int>(std::lround(2.0 * n * c1));
}

void WaveformParams::validate() const {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("n must be a positive even integer");
    if (c1 < 0.0) throw std::invalid_argument("c1 must be non-negative");
    const double steps = 2.0 * n * c1;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw std::invalid_argument("2*n*c1 must be an integer");
    if (n_cpp < 0 || n_cpp > n) throw std::invalid_argument("n_cpp must lie in [0, n]");
    if (!(f_s > 0.0)) throw std::invalid_argument("f_s must be positive");
    if (!(f_c > 0.0)) throw std::invalid_argument("f_c must be positive");
}

CVector chirp_diagonal(double c, int n) {
    if (n < 1) throw std::invalid_argument("chirp_diagonal: n must be >= 1");
    CVector d(n);
    for (int k = 0; k < n; ++k) {
        // Reduce c*k^2 modulo 1 before scaling to keep the phase accurate.
        const double cycles = c * static_cast<double>(k) * static_cast<double>(k);
        const double frac = cycles - std::floor(cycles);
        d[k] = std::polar(1.0, -2.0 * kPi * frac);
    }
    return d;
}

CMatrix build_daft_matrix(const WaveformParams& params) {
    params.validate();
    const int n = params.n;
    const CVector l1 = chirp_diagonal(params.c1, n);
    const CVector l2 = chirp_diagonal(params.c2, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    CMatrix a(n, n);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            const long long idx = (static_cast<long long>(m) * k) % n;
            const Complex f = std::polar(scale, -2.0 * kPi * static_cast<double>(idx) / n);
            a(m, k) = l2[m] * f * l1[k];
        }
    }
    return a;
}

DaftTransform::DaftTransform(const WaveformParams& params)
    : params_(params), a_(build_daft_matrix(params)) {}

CVector DaftTransform::modulate(const SymbolVector& s) const {
    if (s.domain != Domain::daft) throw std::invalid_argument("modulate: expected a DAFT-domain vector");
    if (s.size() != params_.n) throw std::invalid_argument("modulate: length must equal n");
    const int n = params_.n;
    const int ncpp = params_.n_cpp;
    const CVector core = a_.adjoint() * s.values;
    // With 2*n*c1 integer and n even the chirp-periodic prefix is the cyclic prefix.
    CVector out(n + ncpp);
    out.head(ncpp) = core.tail(ncpp);
    out.tail(n) = core;
    return out;
}

SymbolVector DaftTransform::demodulate(const SymbolVector& y) const {
    if (y.domain != Domain::time) throw std::invalid_argument("demodulate: expected a time-domain vector");
    if (y.size() != params_.n) throw std::invalid_argument("demodulate: length must equal n");
    return {Domain::daft, a_ * y.values};
}

CMatrix DaftTransform::conjugate(const CMatrix& m) const {
    if (m.rows() != params_.n || m.cols() != params_.n)
        throw std::invalid_argument("conjugate: matrix must be n x n");
    return a_ * m * a_.adjoint();
}

CVector modulate(const SymbolVector& s, const WaveformParams& params) {
    return DaftTransform(params).modulate(s);
}

SymbolVector demodulate(const SymbolVector& y, const WaveformParams& params) {
    return DaftTransform(params).demodulate(y);
}

SymbolVector strip_prefix(const CVector& x_cpp, const WaveformParams& params) {
    if (x_cpp.size() != params.n + params.n_cpp)
        throw std::invalid_argument("strip_prefix: length must equal n + n_cpp");
    return {Domain::time, x_cpp.tail(params.n)};
}

WaveformParams preset_params(WaveformKind kind, int n, int n_cpp, double f_s, double f_c,
                             int q_max, double c2) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("preset_params: n must be even");
    if (q_max < 0) throw std::invalid_argument("preset_params: q_max must be >= 0");
    WaveformParams p;
    p.n = n;
    p.n_cpp = n_cpp;
    p.f_s = f_s;
    p.f_c = f_c;
    p.c2 = c2;
    switch (kind) {
        case WaveformKind::ofdm: p.c1 = 0.0; break;
        case WaveformKind::ocdm: p.c1 = 1.0 / (2.0 * n); break;
        case WaveformKind::afdm: p.c1 = (2.0 * q_max + 1.0) / (2.0 * n); break;
    }
    p.validate();
    return p;
}

}  // namespace afdm
