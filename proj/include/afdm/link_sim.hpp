// link_sim.hpp - QPSK mapping, MMSE equalization and the Monte-Carlo link loop
//
// One trial draws a channel, a pilot symbol observation and a data symbol
// observation. The channel, the data bits and both unit-variance noise
// vectors are shared by every waveform, pilot size, estimator and SNR of the
// trial, so all comparisons within a run are paired.

#pragma once

#include "afdm/cfr.hpp"
#include "afdm/channel.hpp"
#include "afdm/estimators.hpp"
#include "afdm/transforms.hpp"
#include "afdm/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace afdm {

// Gray-coded QPSK with unit average energy; bit pair (b0, b1) per symbol.
SymbolVector qpsk_map(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> qpsk_demap(const SymbolVector& s);

// (H^H H + I/snr)^{-1} H^H z through a Cholesky solve.
SymbolVector mmse_equalize(const SymbolVector& z, const CfrMatrix& cfr, double snr);

// ||est - truth||_F^2 / ||truth||_F^2
double nmse(const CfrMatrix& estimate, const CfrMatrix& truth);

enum class EstimatorKind { omp, imi, ece, oracle, ideal };

std::string to_string(EstimatorKind kind);
EstimatorKind parse_estimator_kind(std::string_view name);

struct ExperimentConfig {
    std::vector<WaveformKind> waveforms{WaveformKind::afdm, WaveformKind::ocdm, WaveformKind::ofdm};
    WaveformParams base;  // n, n_cpp, f_s, f_c, c2; c1 comes from the preset
    ChannelConfig channel;
    PilotPlacement placement = PilotPlacement::contiguous;
    std::vector<int> n_p{64, 128};
    std::vector<EstimatorKind> estimators{EstimatorKind::omp, EstimatorKind::ideal};
    int imi_levels = 3;
    int omp_known_p = 5;          // 0 switches to residual_tol
    double omp_residual_tol = 1.2;  // in units of the noise norm sigma sqrt(n)
    bool imi_known_p = true;
    std::vector<double> snr_db{0, 10, 20, 30};
    int trials = 100;
    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const;
};

// Row key of the result table. n_p is 1 for the single-pilot estimators
// (ECE, IMI) and 0 for ideal CSI.
struct SeriesKey {
    WaveformKind waveform;
    EstimatorKind estimator;
    int n_p;
    double snr_db;
};

struct SeriesStats {
    int trials = 0;
    int failures = 0;
    double nmse_mean = 0.0;
    double nmse_stderr = 0.0;
    long long bit_errors = 0;
    long long bits = 0;
    double ber = 0.0;
    double ber_stderr = 0.0;
};

struct PairedDifference {
    double mean = 0.0;
    double stderr_ = 0.0;
    int pairs = 0;
};

class ResultTable {
public:
    ResultTable() = default;
    ResultTable(std::vector<SeriesKey> keys, int trials, int bits_per_trial);

    const std::vector<SeriesKey>& keys() const { return keys_; }
    int trials() const { return trials_; }
    int bits_per_trial() const { return bits_per_trial_; }

    // -1 if absent.
    int find(WaveformKind w, EstimatorKind e, int n_p, double snr_db) const;
    SeriesStats stats(int key) const;

    // Per-trial values; NaN nmse and -1 bit errors mark failed trials.
    double nmse_at(int key, int trial) const { return nmse_[slot(key, trial)]; }
    int bit_errors_at(int key, int trial) const { return errors_[slot(key, trial)]; }
    void record(int key, int trial, double nmse, int bit_errors);

    // a - b over trials where both succeeded.
    PairedDifference paired_nmse(int a, int b) const;
    PairedDifference paired_ber(int a, int b) const;

    double elapsed_seconds = 0.0;
    long long ece_failures = 0;
    long long tie_warnings = 0;
    long long rank_warnings = 0;

private:
    std::size_t slot(int key, int trial) const {
        return static_cast<std::size_t>(key) * static_cast<std::size_t>(trials_) + static_cast<std::size_t>(trial);
    }
    std::vector<SeriesKey> keys_;
    int trials_ = 0;
    int bits_per_trial_ = 0;
    std::vector<double> nmse_;
    std::vector<int> errors_;
};

ResultTable run_experiment(const ExperimentConfig& config);

// CSV schema version of nmse.csv / ber.csv.
inline constexpr int kResultSchemaVersion = 1;
std::string nmse_csv(const ResultTable& table);
std::string ber_csv(const ResultTable& table);

}  // namespace afdm
