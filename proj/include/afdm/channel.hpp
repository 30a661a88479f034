// channel.hpp - Multi-scale multi-lag channel operator
//
// Each path i has a complex gain h, a Doppler factor a and a delay tau. After
// sampling, the prefix-free output is y = sum_i h_i H_i x + w with
//
//   H_i[m,n] = g(m,n) e^{j 2 pi D m},                    n <  N - N_cpp
//   H_i[m,n] = (g(m,n) + g(m,n-N)) e^{j 2 pi D m},       n >= N - N_cpp
//   g(m,n)   = Sa(pi ((1+a) m - f_s tau - n)),  D = a f_c / f_s.
//
// In dfs_only mode the time scaling (1+a) m is replaced by m, which is the
// usual radio-channel approximation and makes H_i pseudo-cyclic.

#pragma once

#include "afdm/transforms.hpp"
#include "afdm/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace afdm {

enum class ChannelMode { msml, dfs_only };

std::string to_string(ChannelMode mode);
ChannelMode parse_channel_mode(std::string_view name);

struct Path {
    Complex h{1.0, 0.0};
    double a = 0.0;    // Doppler factor
    double tau = 0.0;  // seconds

    // f_s * tau
    double delay_samples(const WaveformParams& params) const;
    // n * a * f_c / f_s, the Doppler shift in subcarrier spacings
    double normalized_dfs(const WaveformParams& params) const;
};

using PathSet = std::vector<Path>;

struct ChannelConfig {
    int p = 5;
    int l_max = 19;
    int q_max = 1;
    // Target |a| for a path at q_max. Non-positive keeps the waveform's f_c.
    double doppler_order = 1e-4;
    // Power decay per delay sample (nepers); unset means ln(10)/l_max.
    std::optional<double> decay_alpha;
    ChannelMode mode = ChannelMode::msml;
    bool distinct_delays = true;

    double effective_decay_alpha() const;
    void validate(int n) const;
};

// Sa(pi f) = sin(pi f)/(pi f), with Sa(0) = 1.
double sa_pi(double f);

// Unit-gain path matrix; the path's h is ignored.
CMatrix build_path_matrix(const Path& path, const WaveformParams& params, ChannelMode mode);

// sum_i h_i H_i
CMatrix build_channel_matrix(const PathSet& paths, const WaveformParams& params, ChannelMode mode);

// Applies the channel to a prefixed block and returns the prefix-free window
// m = 0..n-1. Noise is CN(0, noise_var) per sample; noise_var = 0 is exact.
SymbolVector apply_channel(const CVector& x_cpp, const PathSet& paths, const WaveformParams& params,
                           ChannelMode mode, double noise_var, Rng& rng);

// Carrier frequency that puts a path with DFS q_max at Doppler factor
// doppler_order, so on-grid DFS values land at the requested order.
double carrier_for_doppler_order(const WaveformParams& params, int q_max, double doppler_order);

// Returns params with f_c replaced per config.doppler_order (if positive).
WaveformParams with_channel_carrier(const WaveformParams& params, const ChannelConfig& config);

// Doppler factor of an on-grid path with integer DFS q.
double doppler_factor_for_dfs(const WaveformParams& params, int q);

// Random on-grid channel: integer delays (distinct by default), integer DFS
// uniform in [-q_max, q_max], CN(0, sigma_i^2) gains with exponential power
// decay normalized to unit total power.
PathSet sample_random_channel(const ChannelConfig& config, const WaveformParams& params, Rng& rng);

}  // namespace afdm
