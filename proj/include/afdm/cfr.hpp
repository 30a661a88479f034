// cfr.hpp - DAFT-domain channel frequency response, loc index and COP
//
// The CFR of a path is A H_i A^H. For an on-grid path (integer delay l,
// integer DFS Q) and negligible time scaling it is pseudo-cyclic: column n
// holds a single nonzero at row (n + Q - 2 N c1 l) mod N. The loc index
// (Q + 2 N c1 l) mod N classifies when two paths land on the same diagonal.

#pragma once

#include "afdm/channel.hpp"
#include "afdm/transforms.hpp"
#include "afdm/types.hpp"

#include <cstdint>

namespace afdm {

enum class CfrProvenance { per_path_unit_gain, total };

struct CfrMatrix {
    CMatrix entries;
    CfrProvenance provenance = CfrProvenance::total;
};

CfrMatrix compute_path_cfr(const CMatrix& path_matrix, const WaveformParams& params);
CfrMatrix compute_path_cfr(const CMatrix& path_matrix, const DaftTransform& daft);

CfrMatrix compute_total_cfr(const PathSet& paths, const WaveformParams& params, ChannelMode mode);
CfrMatrix compute_total_cfr(const PathSet& paths, const DaftTransform& daft, ChannelMode mode);

// (q + 2 n c1 l) mod n, in [0, n).
int loc_index(int l, int q, const WaveformParams& params);

// Row offset of the pseudo-cyclic support: H[(col + offset) mod n, col] != 0.
// Equals (q - 2 n c1 l) mod n; this is loc_index with the DFS sign reversed
// and negated, because the path operator rotates by e^{+j 2 pi D m}.
int cfr_support_offset(int l, int q, const WaveformParams& params);

// Fraction of Frobenius energy outside the diagonal at the given offset.
double off_support_mass(const CMatrix& cfr, int offset);

struct CopEstimate {
    double probability = 0.0;
    double standard_error = 0.0;
    std::int64_t samples = 0;
};

// Exact probability that two independently drawn paths share a loc index.
// Delays follow config.distinct_delays (distinct delays, or distinct (l, Q)
// cells when repeats are allowed); DFS values are uniform and independent.
double cop_enumerate(const ChannelConfig& config, const WaveformParams& params);

CopEstimate cop_monte_carlo(const ChannelConfig& config, const WaveformParams& params,
                            std::int64_t trials, Rng& rng);

}  // namespace afdm
