#include "afdm/metrics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace afdm {

namespace {

ErrorMeasure measure_from_copies(const CMatrix& m, const RankThreshold& threshold) {
    ErrorMeasure em;
    em.r_matrix = m.adjoint() * m;
    // Enforce exact Hermitian symmetry before the eigen solve.
    const CMatrix herm = 0.5 * (em.r_matrix + CMatrix(em.r_matrix.adjoint()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("error_measure: eigen decomposition failed");
    RVector ev = es.eigenvalues().reverse();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::max(ev[i], 0.0);
    em.eigenvalues = ev;

    const double top = ev.size() > 0 ? ev[0] : 0.0;
    const double rank_tol = top * 1e-10;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > rank_tol && ev[i] > 0.0) ++em.rank;
        const double v = threshold.relative ? (top > 0.0 ? ev[i] / top : 0.0) : ev[i];
        if (v >= threshold.epsilon && ev[i] > 0.0) ++em.effective_rank;
    }
    return em;
}

}  // namespace

CMatrix signal_copy_matrix(const SymbolVector& s, const std::vector<CfrMatrix>& per_path_cfrs) {
    if (per_path_cfrs.empty()) throw std::invalid_argument("signal_copy_matrix: need at least one path");
    const Eigen::Index n = s.size();
    CMatrix m(n, static_cast<Eigen::Index>(per_path_cfrs.size()));
    for (std::size_t i = 0; i < per_path_cfrs.size(); ++i) {
        const CMatrix& h = per_path_cfrs[i].entries;
        if (h.rows() != n || h.cols() != n) throw std::invalid_argument("signal_copy_matrix: dimension mismatch");
        m.col(static_cast<Eigen::Index>(i)) = h * s.values;
    }
    return m;
}

ErrorMeasure error_measure(const SymbolVector& delta, const std::vector<CfrMatrix>& per_path_cfrs,
                           const RankThreshold& threshold) {
    if (delta.values.size() == 0 || delta.values.squaredNorm() == 0.0)
        throw std::invalid_argument("error_measure: delta must be nonzero");
    return measure_from_copies(signal_copy_matrix(delta, per_path_cfrs), threshold);
}

double pep_upper_bound(const ErrorMeasure& em, double n0, int p, PepRank which) {
    if (!(n0 > 0.0)) throw std::invalid_argument("pep_upper_bound: n0 must be positive");
    if (p < 1) throw std::invalid_argument("pep_upper_bound: p must be >= 1");
    const int r = which == PepRank::numerical ? em.rank : em.effective_rank;
    double bound = 1.0;
    for (int l = 0; l < r && l < em.eigenvalues.size(); ++l)
        bound /= 1.0 + em.eigenvalues[l] / (4.0 * p * n0);
    return bound;
}

double mip(const CMatrix& columns) {
    if (columns.cols() < 2) throw std::invalid_argument("mip: need at least two columns");
    const RVector norms = columns.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < norms.size(); ++j)
        if (norms[j] == 0.0) throw std::invalid_argument("mip: zero column " + std::to_string(j));
    const CMatrix gram = columns.adjoint() * columns;
    double best = 0.0;
    for (Eigen::Index i = 0; i < gram.rows(); ++i)
        for (Eigen::Index j = i + 1; j < gram.cols(); ++j)
            best = std::max(best, std::abs(gram(i, j)) / (norms[i] * norms[j]));
    return std::min(best, 1.0);
}

SymbolVector sample_error_vector(int n, int weight, Rng& rng) {
    if (weight < 1 || weight > n) throw std::invalid_argument("sample_error_vector: weight must lie in [1, n]");
    static const Complex qpsk[4] = {{M_SQRT1_2, M_SQRT1_2}, {M_SQRT1_2, -M_SQRT1_2},
                                    {-M_SQRT1_2, M_SQRT1_2}, {-M_SQRT1_2, -M_SQRT1_2}};
    std::vector<int> pos(n);
    std::iota(pos.begin(), pos.end(), 0);
    CVector d = CVector::Zero(n);
    std::uniform_int_distribution<int> sym(0, 3);
    std::uniform_int_distribution<int> other(1, 3);
    for (int i = 0; i < weight; ++i) {
        std::uniform_int_distribution<int> pick(i, n - 1);
        std::swap(pos[i], pos[pick(rng)]);
        const int a = sym(rng);
        const int b = (a + other(rng)) % 4;
        d[pos[i]] = qpsk[a] - qpsk[b];
    }
    return {Domain::daft, d};
}

double median(std::vector<double> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size() / 2;
    return values.size() % 2 ? values[k] : 0.5 * (values[k - 1] + values[k]);
}

double DiversityStudy::mean_diversity(std::size_t kind) const {
    const auto& v = diversity.at(kind);
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double DiversityStudy::median_pep(std::size_t kind) const { return median(pep.at(kind)); }

DiversityStudy run_diversity_study(const std::vector<WaveformKind>& kinds, const WaveformParams& base,
                                   const ChannelConfig& channel, const DiversityOptions& options) {
    if (kinds.empty()) throw std::invalid_argument("diversity: no waveform selected");
    if (options.draws < 1 || options.error_samples < 1 || options.max_error_weight < 1)
        throw std::invalid_argument("diversity: draws, error_samples and max_error_weight must be >= 1");
    if (!(options.inv_n0 > 0.0)) throw std::invalid_argument("diversity: inv_n0 must be positive");

    const WaveformParams carrier = with_channel_carrier(base, channel);
    std::vector<DaftTransform> daft;
    for (WaveformKind k : kinds)
        daft.emplace_back(preset_params(k, carrier.n, carrier.n_cpp, carrier.f_s, carrier.f_c, channel.q_max, carrier.c2));

    DiversityStudy out;
    out.kinds = kinds;
    out.diversity.assign(kinds.size(), {});
    out.pep.assign(kinds.size(), {});
    const double n0 = 1.0 / options.inv_n0;

    for (int draw = 0; draw < options.draws; ++draw) {
        Rng rng = make_substream(options.seed, static_cast<std::uint64_t>(draw));
        const PathSet paths = sample_random_channel(channel, carrier, rng);
        std::vector<CMatrix> h;
        for (const Path& p : paths) h.push_back(build_path_matrix(p, carrier, channel.mode));
        std::vector<SymbolVector> deltas;
        for (int e = 0; e < options.error_samples; ++e)
            deltas.push_back(sample_error_vector(carrier.n, 1 + e % std::min(options.max_error_weight, carrier.n), rng));

        for (std::size_t k = 0; k < kinds.size(); ++k) {
            const CMatrix& a = daft[k].matrix();
            int worst_rank = std::numeric_limits<int>::max();
            double worst_pep = 0.0;
            for (const SymbolVector& d : deltas) {
                // H_bar_i d = A H_i A^H d without forming H_bar_i.
                const CVector t = a.adjoint() * d.values;
                CMatrix m(carrier.n, static_cast<Eigen::Index>(paths.size()));
                for (std::size_t i = 0; i < paths.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = a * (h[i] * t);
                const ErrorMeasure em = measure_from_copies(m, options.threshold);
                worst_rank = std::min(worst_rank, em.effective_rank);
                worst_pep = std::max(worst_pep, pep_upper_bound(em, n0, static_cast<int>(paths.size())));
            }
            out.diversity[k].push_back(worst_rank);
            out.pep[k].push_back(worst_pep);
        }
    }
    return out;
}

}  // namespace afdm
