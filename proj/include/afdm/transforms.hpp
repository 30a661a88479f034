// transforms.hpp - Discrete affine Fourier transform and chirp-periodic prefix
//
// DAFT matrix A = Lambda(c2) F Lambda(c1), where F is the unitary DFT and
// Lambda(c) = diag(exp(-j 2 pi c n^2)). Modulation is x = A^H s followed by
// the prefix; demodulation is z = A y on the prefix-free block.
//
// OFDM (c1 = 0) and OCDM (c1 = 1/(2N)) are the special cases of the same
// transform, so all three waveforms share this code.

#pragma once

#include "afdm/types.hpp"

#include <string>
#include <string_view>

namespace afdm {

enum class WaveformKind { ofdm, ocdm, afdm };

std::string to_string(WaveformKind kind);
WaveformKind parse_waveform_kind(std::string_view name);

struct WaveformParams {
    int n = 128;          // subcarrier count, even
    double c1 = 0.0;      // 2*n*c1 must be an integer
    double c2 = 0.0;
    int n_cpp = 32;       // prefix length in samples
    double f_s = 1500.0;  // Hz
    double f_c = 35000.0; // Hz

    // Integer 2*n*c1; the DAFT-domain shift produced by one sample of delay.
    int chirp_steps() const;

    // Throws std::invalid_argument when an invariant is violated.
    void validate() const;
};

enum class Domain { daft, time };

// A length-n block in one of the two domains. The prefix never lives here.
struct SymbolVector {
    Domain domain = Domain::daft;
    CVector values;

    Eigen::Index size() const { return values.size(); }
};

CVector chirp_diagonal(double c, int n);

CMatrix build_daft_matrix(const WaveformParams& params);

// Returns the n + n_cpp samples of the transmitted block (prefix first).
CVector modulate(const SymbolVector& s, const WaveformParams& params);

// Expects the prefix-free received block.
SymbolVector demodulate(const SymbolVector& y, const WaveformParams& params);

// Drops the first n_cpp samples.
SymbolVector strip_prefix(const CVector& x_cpp, const WaveformParams& params);

// OFDM: c1 = 0. OCDM: c1 = 1/(2n). AFDM: c1 = (2 q_max + 1)/(2n).
WaveformParams preset_params(WaveformKind kind, int n, int n_cpp, double f_s, double f_c,
                             int q_max, double c2 = 0.0);

// Caches A for repeated (de)modulation with the same parameters.
class DaftTransform {
public:
    explicit DaftTransform(const WaveformParams& params);

    const WaveformParams& params() const { return params_; }
    const CMatrix& matrix() const { return a_; }

    CVector modulate(const SymbolVector& s) const;
    SymbolVector demodulate(const SymbolVector& y) const;

    // A M A^H for a time-domain operator M.
    CMatrix conjugate(const CMatrix& m) const;

private:
    WaveformParams params_;
    CMatrix a_;
};

}  // namespace afdm
