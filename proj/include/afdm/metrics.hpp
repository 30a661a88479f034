// metrics.hpp - diversity, pairwise error probability bound and coherence
//
// For an error vector delta = s_m - s_n the matrix M(delta) collects the
// copies H_i delta received through each unit-gain path. The eigenvalues of
// R = M^H M set the diversity order and the PEP bound
//
//   PEP <= prod_l 1 / (1 + lambda_l^2 / (4 P N0)).

#pragma once

#include "afdm/cfr.hpp"
#include "afdm/channel.hpp"
#include "afdm/transforms.hpp"
#include "afdm/types.hpp"

#include <cstdint>
#include <vector>

namespace afdm {

struct RankThreshold {
    double epsilon = 0.1;
    // Compare lambda^2 / max(lambda^2) against epsilon instead of lambda^2.
    bool relative = false;
};

struct ErrorMeasure {
    CMatrix r_matrix;
    RVector eigenvalues;  // lambda_l^2, descending, clamped at 0
    int rank = 0;         // numerical rank
    int effective_rank = 0;
};

// Column i is H_i s.
CMatrix signal_copy_matrix(const SymbolVector& s, const std::vector<CfrMatrix>& per_path_cfrs);

ErrorMeasure error_measure(const SymbolVector& delta, const std::vector<CfrMatrix>& per_path_cfrs,
                           const RankThreshold& threshold = {});

enum class PepRank { numerical, effective };

double pep_upper_bound(const ErrorMeasure& em, double n0, int p, PepRank which = PepRank::numerical);

// Maximum normalized correlation between two distinct columns.
double mip(const CMatrix& columns);

struct DiversityOptions {
    int draws = 500;
    // Error vectors per channel draw; weight cycles through 1..max_error_weight.
    int error_samples = 16;
    int max_error_weight = 4;
    double inv_n0 = 50.0;
    RankThreshold threshold;
    std::uint64_t seed = 1;
};

struct DiversityStudy {
    std::vector<WaveformKind> kinds;
    // [kind][draw]: minimum effective rank and worst PEP bound over the sampled deltas.
    std::vector<std::vector<int>> diversity;
    std::vector<std::vector<double>> pep;

    double mean_diversity(std::size_t kind) const;
    double median_pep(std::size_t kind) const;
};

// Channels are drawn once per draw and shared by all waveforms; so are the
// sampled error vectors.
DiversityStudy run_diversity_study(const std::vector<WaveformKind>& kinds, const WaveformParams& base,
                                   const ChannelConfig& channel, const DiversityOptions& options);

// Error vector between a random QPSK word and a copy with `weight` symbols changed.
SymbolVector sample_error_vector(int n, int weight, Rng& rng);

double median(std::vector<double> values);

}  // namespace afdm
