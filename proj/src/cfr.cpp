#include "afdm/cfr.hpp"

#include <cmath>
#include <stdexcept>

namespace afdm {

namespace {

int mod_n(long long v, int n) {
    const long long r = v % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

}  // namespace

CfrMatrix compute_path_cfr(const CMatrix& path_matrix, const DaftTransform& daft) {
    return {daft.conjugate(path_matrix), CfrProvenance::per_path_unit_gain};
}

CfrMatrix compute_path_cfr(const CMatrix& path_matrix, const WaveformParams& params) {
    if (path_matrix.rows() != params.n || path_matrix.cols() != params.n)
        throw std::invalid_argument("compute_path_cfr: dimension mismatch");
    return compute_path_cfr(path_matrix, DaftTransform(params));
}

CfrMatrix compute_total_cfr(const PathSet& paths, const DaftTransform& daft, ChannelMode mode) {
    if (paths.empty()) throw std::invalid_argument("compute_total_cfr: empty path set");
    // A (sum h_i H_i) A^H: one conjugation instead of one per path.
    return {daft.conjugate(build_channel_matrix(paths, daft.params(), mode)), CfrProvenance::total};
}

CfrMatrix compute_total_cfr(const PathSet& paths, const WaveformParams& params, ChannelMode mode) {
    return compute_total_cfr(paths, DaftTransform(params), mode);
}

int loc_index(int l, int q, const WaveformParams& params) {
    return mod_n(static_cast<long long>(q) + static_cast<long long>(params.chirp_steps()) * l, params.n);
}

int cfr_support_offset(int l, int q, const WaveformParams& params) {
    return mod_n(static_cast<long long>(q) - static_cast<long long>(params.chirp_steps()) * l, params.n);
}

double off_support_mass(const CMatrix& cfr, int offset) {
    const Eigen::Index n = cfr.rows();
    if (cfr.cols() != n) throw std::invalid_argument("off_support_mass: matrix must be square");
    const double total = cfr.squaredNorm();
    if (total == 0.0) return 0.0;
    double on = 0.0;
    for (Eigen::Index col = 0; col < n; ++col) on += std::norm(cfr(mod_n(col + offset, static_cast<int>(n)), col));
    return std::max(0.0, (total - on) / total);
}

double cop_enumerate(const ChannelConfig& config, const WaveformParams& params) {
    config.validate(params.n);
    const int nl = config.l_max + 1;
    long long hits = 0;
    long long pairs = 0;
    for (int l1 = 0; l1 < nl; ++l1)
        for (int q1 = -config.q_max; q1 <= config.q_max; ++q1)
            for (int l2 = 0; l2 < nl; ++l2)
                for (int q2 = -config.q_max; q2 <= config.q_max; ++q2) {
                    if (config.distinct_delays ? l1 == l2 : (l1 == l2 && q1 == q2)) continue;
                    ++pairs;
                    if (loc_index(l1, q1, params) == loc_index(l2, q2, params)) ++hits;
                }
    if (pairs == 0) throw std::invalid_argument("cop_enumerate: grid admits no pair of paths");
    return static_cast<double>(hits) / static_cast<double>(pairs);
}

CopEstimate cop_monte_carlo(const ChannelConfig& config, const WaveformParams& params,
                            std::int64_t trials, Rng& rng) {
    config.validate(params.n);
    if (trials < 1) throw std::invalid_argument("cop_monte_carlo: trials must be >= 1");
    std::uniform_int_distribution<int> pick_l(0, config.l_max);
    std::uniform_int_distribution<int> pick_q(-config.q_max, config.q_max);
    std::int64_t hits = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        int l1, q1, l2, q2;
        // Rejection sampling gives the same conditional law as the enumeration.
        do {
            l1 = pick_l(rng);
            q1 = pick_q(rng);
            l2 = pick_l(rng);
            q2 = pick_q(rng);
        } while (config.distinct_delays ? l1 == l2 : (l1 == l2 && q1 == q2));
        if (loc_index(l1, q1, params) == loc_index(l2, q2, params)) ++hits;
    }
    CopEstimate est;
    est.samples = trials;
    est.probability = static_cast<double>(hits) / static_cast<double>(trials);
    est.standard_error = std::sqrt(est.probability * (1.0 - est.probability) / static_cast<double>(trials));
    return est;
}

}  // namespace afdm
