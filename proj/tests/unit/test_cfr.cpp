#include "afdm/cfr.hpp"

#include "../common/oracles.hpp"
#include "doctest.h"

#include <cmath>
#include <set>

using namespace afdm;

namespace {

WaveformParams carrier_params(WaveformKind k, int n, int n_cpp, double order, int q_max = 1) {
    WaveformParams p = preset_params(k, n, n_cpp, 1500.0, 35000.0, q_max);
    p.f_c = carrier_for_doppler_order(p, q_max, order);
    return p;
}

Path on_grid(const WaveformParams& p, int l, int q, Complex h = {1.0, 0.0}) {
    Path path;
    path.tau = l / p.f_s;
    path.a = doppler_factor_for_dfs(p, q);
    path.h = h;
    return path;
}

}  // namespace

TEST_CASE("CFR of the identity is the identity") {
    const WaveformParams p = carrier_params(WaveformKind::afdm, 16, 4, 1e-3);
    const CfrMatrix c = compute_path_cfr(CMatrix::Identity(16, 16), p);
    CHECK(c.provenance == CfrProvenance::per_path_unit_gain);
    CHECK((c.entries - CMatrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("CFR matches the quadruple-sum oracle") {
    Rng rng = make_substream(2, 0);
    for (WaveformKind k : {WaveformKind::ofdm, WaveformKind::ocdm, WaveformKind::afdm}) {
        WaveformParams p = carrier_params(k, 8, 2, 1e-2);
        p.c2 = 0.05;
        CMatrix h(8, 8);
        for (Eigen::Index i = 0; i < h.size(); ++i) h(i) = complex_gaussian(rng, 1.0);
        const CMatrix ref = oracle::conjugate_quadruple_sum(oracle::daft_matrix(8, p.c1, p.c2), h);
        CHECK((compute_path_cfr(h, p).entries - ref).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("pseudo-cyclic support of an on-grid dfs-only path") {
    const WaveformParams p = carrier_params(WaveformKind::afdm, 16, 4, 1e-3);
    const int l = 2, q = 1;
    const CfrMatrix c = compute_path_cfr(build_path_matrix(on_grid(p, l, q), p, ChannelMode::dfs_only), p);
    const int off = cfr_support_offset(l, q, p);
    CHECK(off == ((q - 3 * l) % 16 + 16) % 16);
    for (int row = 0; row < 16; ++row)
        for (int col = 0; col < 16; ++col) {
            const bool on = row == (col + off) % 16;
            // Row m is nonzero at column (m + loc(l, -Q)) mod N.
            CHECK(on == (col == (row + loc_index(l, -q, p)) % 16));
            if (on) CHECK(std::abs(c.entries(row, col)) == doctest::Approx(1.0));
            else CHECK(std::abs(c.entries(row, col)) < 1e-12);
        }
    CHECK(off_support_mass(c.entries, off) < 1e-9);
}

TEST_CASE("Frobenius norm is preserved and the total CFR is linear") {
    const WaveformParams p = carrier_params(WaveformKind::ocdm, 16, 6, 1e-2);
    Rng rng = make_substream(4, 0);
    ChannelConfig cfg;
    cfg.p = 2;
    cfg.l_max = 5;
    const PathSet paths = sample_random_channel(cfg, p, rng);
    const DaftTransform daft(p);
    CMatrix sum = CMatrix::Zero(16, 16);
    for (const Path& path : paths) {
        const CMatrix h = build_path_matrix(path, p, ChannelMode::msml);
        const CfrMatrix c = compute_path_cfr(h, daft);
        CHECK(c.entries.norm() == doctest::Approx(h.norm()).epsilon(1e-9));
        sum += path.h * c.entries;
    }
    const CfrMatrix total = compute_total_cfr(paths, daft, ChannelMode::msml);
    CHECK(total.provenance == CfrProvenance::total);
    CHECK((total.entries - sum).cwiseAbs().maxCoeff() < 1e-12);
    const CMatrix a = daft.matrix();
    CHECK((total.entries - a * build_channel_matrix(paths, p, ChannelMode::msml) * a.adjoint()).cwiseAbs().maxCoeff() <
          1e-12);
    const Complex g{0.3, -1.7};
    const CfrMatrix unit = compute_total_cfr({on_grid(p, 1, 0)}, daft, ChannelMode::msml);
    const CfrMatrix scaled = compute_total_cfr({on_grid(p, 1, 0, g)}, daft, ChannelMode::msml);
    CHECK((scaled.entries - g * unit.entries).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("loc index examples") {
    const WaveformParams afdm = preset_params(WaveformKind::afdm, 128, 32, 1500, 35000, 1);
    CHECK(loc_index(0, 0, afdm) == 0);
    CHECK(loc_index(1, 0, afdm) == 3);
    CHECK(loc_index(0, 1, afdm) == 1);
    CHECK(loc_index(0, -1, afdm) == 127);
    const WaveformParams ofdm = preset_params(WaveformKind::ofdm, 128, 32, 1500, 35000, 1);
    CHECK(loc_index(5, 1, ofdm) == 1);
    CHECK(loc_index(9, 1, ofdm) == 1);
}

TEST_CASE("dfs-only CFRs are pseudo-cyclic for every waveform") {
    for (WaveformKind k : {WaveformKind::ofdm, WaveformKind::ocdm, WaveformKind::afdm}) {
        const WaveformParams p = carrier_params(k, 64, 16, 1e-2);
        const DaftTransform daft(p);
        for (int l : {0, 3, 11})
            for (int q : {-1, 0, 1}) {
                const CfrMatrix c =
                    compute_path_cfr(build_path_matrix(on_grid(p, l, q), p, ChannelMode::dfs_only), daft);
                CHECK(off_support_mass(c.entries, cfr_support_offset(l, q, p)) < 1e-9);
            }
    }
}

TEST_CASE("msml off-support mass grows with the Doppler order") {
    for (WaveformKind k : {WaveformKind::ofdm, WaveformKind::ocdm, WaveformKind::afdm})
        for (int q : {-1, 1}) {
            double prev = -1.0;
            for (double order : {1e-4, 1e-3, 1e-2}) {
                const WaveformParams p = carrier_params(k, 64, 16, order);
                const CfrMatrix c = compute_path_cfr(build_path_matrix(on_grid(p, 4, q), p, ChannelMode::msml), p);
                const double mass = off_support_mass(c.entries, cfr_support_offset(4, q, p));
                CHECK(mass > prev);
                prev = mass;
            }
        }
}

TEST_CASE("COP enumeration") {
    ChannelConfig cfg;
    cfg.l_max = 19;
    cfg.q_max = 1;
    const WaveformParams afdm = preset_params(WaveformKind::afdm, 128, 32, 1500, 35000, 1);
    const WaveformParams ocdm = preset_params(WaveformKind::ocdm, 128, 32, 1500, 35000, 1);
    const WaveformParams ofdm = preset_params(WaveformKind::ofdm, 128, 32, 1500, 35000, 1);
    CHECK(cop_enumerate(cfg, afdm) == 0.0);
    cfg.distinct_delays = false;
    CHECK(cop_enumerate(cfg, afdm) == 0.0);
    cfg.distinct_delays = true;
    const double a = cop_enumerate(cfg, afdm), b = cop_enumerate(cfg, ocdm), c = cop_enumerate(cfg, ofdm);
    CHECK(a <= b);
    CHECK(b <= c);
    // OFDM: loc = Q, so two paths with distinct delays collide iff their DFS match.
    CHECK(c == doctest::Approx(1.0 / 3.0));

    ChannelConfig flat = cfg;
    flat.q_max = 0;
    CHECK(cop_enumerate(flat, ofdm) == 1.0);
}

TEST_CASE("COP Monte Carlo agrees with enumeration") {
    ChannelConfig cfg;
    cfg.l_max = 15;
    cfg.q_max = 2;
    for (WaveformKind k : {WaveformKind::ofdm, WaveformKind::ocdm, WaveformKind::afdm}) {
        const WaveformParams p = preset_params(k, 128, 32, 1500, 35000, 2);
        Rng rng = make_substream(17, static_cast<int>(k));
        const double exact = cop_enumerate(cfg, p);
        const CopEstimate mc = cop_monte_carlo(cfg, p, 100000, rng);
        const double sigma = std::sqrt(std::max(exact * (1 - exact), 1e-12) / mc.samples);
        CHECK(std::abs(mc.probability - exact) <= 3.0 * sigma + 1e-12);
    }
    CHECK(cop_enumerate(cfg, preset_params(WaveformKind::ofdm, 128, 32, 1500, 35000, 2)) == doctest::Approx(0.2));
}

TEST_CASE("AFDM separates every grid cell, OFDM collides on equal DFS") {
    const WaveformParams afdm = preset_params(WaveformKind::afdm, 128, 32, 1500, 35000, 1);
    const WaveformParams ofdm = preset_params(WaveformKind::ofdm, 128, 32, 1500, 35000, 1);
    std::set<int> seen;
    for (int l = 0; l <= 19; ++l)
        for (int q = -1; q <= 1; ++q) seen.insert(loc_index(l, q, afdm));
    CHECK(seen.size() == 60u);
    for (int q = -1; q <= 1; ++q) CHECK(loc_index(3, q, ofdm) == loc_index(17, q, ofdm));
}

TEST_CASE("CFR contract errors") {
    const WaveformParams p = preset_params(WaveformKind::afdm, 8, 2, 1500, 35000, 1);
    CHECK_THROWS_AS(compute_path_cfr(CMatrix::Identity(4, 4), p), std::invalid_argument);
    CHECK_THROWS_AS(compute_total_cfr(PathSet{}, p, ChannelMode::msml), std::invalid_argument);
    Rng rng(1);
    ChannelConfig cfg;
    cfg.l_max = 3;
    cfg.p = 2;
    CHECK_THROWS_AS(cop_monte_carlo(cfg, p, 0, rng), std::invalid_argument);
}
