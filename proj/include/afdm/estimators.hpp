// estimators.hpp - pilot design and DAFT-domain channel estimators
//
// All estimators observe z = H_bar s_p + w for a dedicated training symbol s_p
// and return the recovered paths together with the reconstructed CFR.
//
//   ECE  inverts the nominal peak position of each path (single pilot).
//   IMI  looks peaks up in precomputed index matrices Psi_1..Psi_K and
//        cancels each detected path before the next search (single pilot).
//   OMP  greedy sparse recovery over a delay x Doppler-factor dictionary.

#pragma once

#include "afdm/cfr.hpp"
#include "afdm/channel.hpp"
#include "afdm/metrics.hpp"
#include "afdm/transforms.hpp"
#include "afdm/types.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace afdm {

enum class PilotPlacement { single_first, equispaced, contiguous };

std::string to_string(PilotPlacement placement);
PilotPlacement parse_pilot_placement(std::string_view name);

struct PilotSpec {
    int n = 128;
    int n_p = 1;
    PilotPlacement placement = PilotPlacement::single_first;
    CVector pilot_values;  // unit modulus, one per pilot position

    std::vector<int> positions() const;
    void validate() const;
};

// single_first always uses the value 1. Other placements draw unit-modulus
// random phases from `seed`, so the pilot is reproducible.
PilotSpec make_pilot(int n, int n_p, PilotPlacement placement, std::uint64_t seed);

// DAFT-domain training symbol; the pilots are scaled by sqrt(n / n_p) so
// every training symbol carries energy n, the same as a data symbol.
SymbolVector training_symbol(const PilotSpec& pilot);

struct GridPoint {
    double tau = 0.0;  // s
    double a = 0.0;    // Doppler factor
    int l = 0;         // nearest integer delay
    int q = 0;         // nearest integer DFS
};

struct Dictionary {
    CMatrix columns;               // n x (N_tau * N_a), column j = Gamma_j s
    std::vector<GridPoint> grid;   // delay-major: j = i_tau * N_a + i_a
    PilotSpec pilot;
    WaveformParams params;
    ChannelMode mode = ChannelMode::msml;
    int n_tau = 0;
    int n_a = 0;
    // Unit-gain CFR per column; empty for imported dictionaries.
    std::shared_ptr<const std::vector<CMatrix>> atoms;

    Eigen::Index size() const { return columns.cols(); }
    bool has_atoms() const { return atoms && !atoms->empty(); }
    // Column of the grid point nearest to (l, q), or -1 outside the grid.
    int column_of(int l, int q) const;
};

struct DictionaryOptions {
    ChannelMode mode = ChannelMode::msml;
    int column_cap = 4096;
};

Dictionary build_dictionary(const PilotSpec& pilot, double tau_max, double a_max, double delta_a,
                            const WaveformParams& params, const DictionaryOptions& options = {});

// Grid matching an on-grid channel: delays 0..l_max and DFS -q_max..q_max.
Dictionary build_channel_dictionary(const PilotSpec& pilot, const WaveformParams& params,
                                    const ChannelConfig& channel, const DictionaryOptions& options = {});

// Same grid and atoms with the columns recomputed for another pilot.
Dictionary with_pilot(const Dictionary& dict, const PilotSpec& pilot);

double mip(const Dictionary& dict);

// Psi_k(l, q): output index of the k-th largest magnitude of the unit-gain
// response of the cell, k = 0..levels-1. Requires a dictionary whose grid
// is the integer (l, Q) grid.
struct IndexMatrices {
    int levels = 0;
    int l_max = 0;
    int q_max = 0;
    std::vector<int> index;  // [(level * cells) + column]

    int cells() const { return (l_max + 1) * (2 * q_max + 1); }
    int column(int l, int q) const { return l * (2 * q_max + 1) + (q + q_max); }
    int at(int level, int column) const { return index[static_cast<std::size_t>(level) * cells() + column]; }
    int at(int level, int l, int q) const { return at(level, column(l, q)); }
    // Cells sharing their Psi_1 entry with another cell.
    std::vector<std::pair<int, int>> ambiguous_cells() const;
};

IndexMatrices build_index_matrices(const Dictionary& dict, int levels);
IndexMatrices build_index_matrices(const WaveformParams& params, const ChannelConfig& channel, int levels,
                                   const PilotSpec& pilot);

struct EstimatedPath {
    int column = -1;
    int l = 0;
    int q = 0;
    double tau = 0.0;
    double a = 0.0;
    Complex h{0.0, 0.0};
};

struct EstimationResult {
    std::vector<EstimatedPath> paths;
    CfrMatrix cfr_estimate;
    double residual_norm = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;
    int tie_warnings = 0;
    bool rank_deficient = false;
};

struct EceOptions {
    int max_paths = 5;
    double noise_std = 0.0;
    double threshold_factor = 3.0;
};

// Throws AmbiguityError when the Psi_1 table differs from the nominal peak
// table or the nominal table is not injective.
void check_ece_applicable(const Dictionary& dict, const IndexMatrices& psi);
EstimationResult ece_estimate(const SymbolVector& z, const Dictionary& dict, const IndexMatrices& psi,
                              const EceOptions& options);

struct ImiOptions {
    // Known path count; 0 stops on the residual-peak threshold instead.
    int max_paths = 5;
    double noise_std = 0.0;
    double threshold_factor = 3.0;
    // Joint LS over the detected support after the search.
    bool final_refit = true;
};

EstimationResult imi_estimate(const SymbolVector& z, const Dictionary& dict, const IndexMatrices& psi,
                              const ImiOptions& options);

struct OmpStop {
    int known_p = 5;            // > 0: fixed iteration count
    double residual_tol = 0.0;  // used when known_p == 0
};

EstimationResult omp_estimate(const SymbolVector& z, const Dictionary& dict, const OmpStop& stop);

// Least squares on a given support; used as an oracle reference.
EstimationResult support_ls_estimate(const SymbolVector& z, const Dictionary& dict, const std::vector<int>& support);

// Columnar CSV export: grid.csv, pilot.csv and columns.csv in `dir`.
void export_dictionary(const Dictionary& dict, const std::string& dir);
// Imported dictionaries carry columns, grid and pilot but no atoms.
Dictionary import_dictionary(const std::string& dir);

}  // namespace afdm
