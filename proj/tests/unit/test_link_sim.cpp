#include "afdm/link_sim.hpp"

#include "../common/oracles.hpp"
#include "doctest.h"

#include <cmath>

using namespace afdm;

TEST_CASE("QPSK mapping") {
    const double r = 1.0 / std::sqrt(2.0);
    const SymbolVector zeros = qpsk_map(std::vector<std::uint8_t>(8, 0));
    CHECK(zeros.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(zeros.values[i] - Complex(r, r)) < 1e-15);

    Rng rng = make_substream(3, 0);
    std::vector<std::uint8_t> bits(256);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : bits) b = static_cast<std::uint8_t>(bit(rng));
    const SymbolVector s = qpsk_map(bits);
    CHECK(s.values.squaredNorm() == doctest::Approx(128.0));
    CHECK(qpsk_demap(s) == bits);

    // Noisy points decode to the nearest constellation point.
    const CVector noisy = s.values + complex_gaussian_vector(rng, 128, 0.5);
    const std::vector<std::uint8_t> hard = qpsk_demap({Domain::daft, noisy});
    for (int i = 0; i < 128; ++i) {
        const int idx = oracle::nearest_qpsk(noisy[i]);
        CHECK(hard[2 * i] == (idx >> 1));
        CHECK(hard[2 * i + 1] == (idx & 1));
    }
    CHECK_THROWS_AS(qpsk_map(std::vector<std::uint8_t>(3, 0)), std::invalid_argument);
}

TEST_CASE("MMSE equalizer") {
    SUBCASE("identity channel at very high SNR passes the input through") {
        const CfrMatrix eye{CMatrix::Identity(16, 16), CfrProvenance::total};
        Rng rng = make_substream(1, 0);
        const CVector z = complex_gaussian_vector(rng, 16, 1.0);
        CHECK((mmse_equalize({Domain::daft, z}, eye, 1e12).values - z).norm() < 1e-10);
        CHECK(mmse_equalize({Domain::daft, CVector::Zero(16)}, eye, 10.0).values.norm() == 0.0);
    }
    SUBCASE("matches the normal equations") {
        Rng rng = make_substream(2, 0);
        CMatrix h(16, 16);
        for (int i = 0; i < 16; ++i) h.col(i) = complex_gaussian_vector(rng, 16, 1.0);
        const CVector z = complex_gaussian_vector(rng, 16, 1.0);
        for (double snr : {0.5, 10.0, 1000.0}) {
            const CVector got = mmse_equalize({Domain::daft, z}, {h, CfrProvenance::total}, snr).values;
            CHECK((got - oracle::mmse_normal_equations(h, z, snr)).norm() <= 1e-8 * std::max(1.0, got.norm()));
        }
    }
}

TEST_CASE("NMSE") {
    Rng rng = make_substream(4, 0);
    CMatrix h(8, 8);
    for (int i = 0; i < 8; ++i) h.col(i) = complex_gaussian_vector(rng, 8, 1.0);
    const CfrMatrix truth{h, CfrProvenance::total};
    CHECK(nmse(truth, truth) == 0.0);
    CHECK(nmse({CMatrix::Zero(8, 8), CfrProvenance::total}, truth) == doctest::Approx(1.0));
    const Complex alpha{0.7, 0.2};
    CHECK(nmse({alpha * h, CfrProvenance::total}, truth) == doctest::Approx(std::norm(1.0 - alpha)));
    CHECK_THROWS(nmse({CMatrix::Zero(4, 4), CfrProvenance::total}, truth));
}

TEST_CASE("estimator kind names") {
    for (EstimatorKind k : {EstimatorKind::omp, EstimatorKind::imi, EstimatorKind::ece, EstimatorKind::oracle,
                            EstimatorKind::ideal})
        CHECK(parse_estimator_kind(to_string(k)) == k);
    CHECK_THROWS(parse_estimator_kind("ls"));
}

namespace {

ExperimentConfig small_config() {
    ExperimentConfig c;
    c.base.n = 32;
    c.base.n_cpp = 8;
    c.channel.l_max = 5;
    c.channel.p = 3;
    c.channel.doppler_order = 1e-3;
    c.n_p = {16, 32};
    c.estimators = {EstimatorKind::omp, EstimatorKind::imi, EstimatorKind::oracle, EstimatorKind::ideal};
    c.omp_known_p = 3;
    c.snr_db = {10, 60};
    c.trials = 12;
    c.seed = 77;
    return c;
}

}  // namespace

TEST_CASE("ideal CSI at very high SNR decodes without errors") {
    ExperimentConfig c = small_config();
    c.estimators = {EstimatorKind::ideal};
    c.snr_db = {120};
    const ResultTable t = run_experiment(c);
    for (std::size_t k = 0; k < t.keys().size(); ++k) {
        const SeriesStats s = t.stats(static_cast<int>(k));
        CHECK(s.failures == 0);
        CHECK(s.bit_errors == 0);
        CHECK(s.bits == 12LL * 64);
    }
}

TEST_CASE("experiment table layout and failure accounting") {
    const ResultTable t = run_experiment(small_config());
    // 3 waveforms x (omp 2 n_p + oracle 2 n_p + imi + ideal) x 2 SNRs
    CHECK(t.keys().size() == 3u * 6u * 2u);
    const int ideal = t.find(WaveformKind::afdm, EstimatorKind::ideal, 0, 10);
    const int imi = t.find(WaveformKind::afdm, EstimatorKind::imi, 1, 10);
    const int omp = t.find(WaveformKind::afdm, EstimatorKind::omp, 32, 60);
    REQUIRE(ideal >= 0);
    REQUIRE(imi >= 0);
    REQUIRE(omp >= 0);
    CHECK(t.find(WaveformKind::afdm, EstimatorKind::omp, 48, 10) == -1);
    CHECK(t.stats(ideal).nmse_mean == 0.0);
    CHECK(t.stats(omp).nmse_mean < 1e-4);
    const PairedDifference d = t.paired_nmse(ideal, ideal);
    CHECK(d.mean == 0.0);
    CHECK(d.pairs == 12);
}

TEST_CASE("results are identical for any worker count") {
    ExperimentConfig c = small_config();
    c.workers = 1;
    const ResultTable a = run_experiment(c);
    c.workers = 4;
    const ResultTable b = run_experiment(c);
    CHECK(nmse_csv(a) == nmse_csv(b));
    CHECK(ber_csv(a) == ber_csv(b));
    c.seed = 78;
    CHECK(nmse_csv(run_experiment(c)) != nmse_csv(a));
}

TEST_CASE("result CSV headers") {
    ExperimentConfig c = small_config();
    c.trials = 2;
    const ResultTable t = run_experiment(c);
    const std::string n = nmse_csv(t);
    const std::string b = ber_csv(t);
    CHECK(n.substr(0, n.find('\n')) == "waveform,estimator,n_p,snr_db,trials,failures,nmse_mean,nmse_stderr");
    CHECK(b.substr(0, b.find('\n')) ==
          "waveform,estimator,n_p,snr_db,trials,failures,bit_errors,bits,ber,ber_stderr");
    CHECK(std::count(n.begin(), n.end(), '\n') == static_cast<long>(t.keys().size()) + 1);
}

TEST_CASE("experiment config validation") {
    ExperimentConfig c = small_config();
    c.trials = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.n_p = {64};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = small_config();
    c.workers = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
