#include "afdm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace afdm {

std::string to_string(ChannelMode mode) {
    return mode == ChannelMode::msml ? "msml" : "dfs-only";
}

ChannelMode parse_channel_mode(std::string_view name) {
    if (name == "msml") return ChannelMode::msml;
    if (name == "dfs-only" || name == "dfs_only") return ChannelMode::dfs_only;
    throw std::invalid_argument("unknown channel mode '" + std::string(name) + "'");
}

double Path::delay_samples(const WaveformParams& params) const { return params.f_s * tau; }

double Path::normalized_dfs(const WaveformParams& params) const {
    return params.n * a * params.f_c / params.f_s;
}

double ChannelConfig::effective_decay_alpha() const {
    if (decay_alpha) return *decay_alpha;
    // 10 dB between the first and the last admissible tap.
    return l_max > 0 ? std::log(10.0) / l_max : 0.0;
}

void ChannelConfig::validate(int n) const {
    if (p < 1) throw std::invalid_argument("channel: path count must be >= 1");
    if (l_max < 0 || l_max >= n) throw std::invalid_argument("channel: l_max must lie in [0, n)");
    if (q_max < 0) throw std::invalid_argument("channel: q_max must be >= 0");
    if (distinct_delays && p > l_max + 1)
        throw std::invalid_argument("channel: more paths than distinct delays (p > l_max + 1)");
    if (decay_alpha && *decay_alpha < 0.0) throw std::invalid_argument("channel: decay_alpha must be >= 0");
}

double sa_pi(double f) {
    if (f == 0.0) return 1.0;
    const double x = kPi * f;
    return std::sin(x) / x;
}

namespace {

struct PathKernel {
    double scale;   // (1+a) or 1
    double delay;   // f_s tau
    double dfs;     // D = a f_c / f_s

    double g(int m, int n) const { return sa_pi(scale * m - delay - n); }
    Complex rotation(int m) const {
        // D*m reduced modulo 1 before forming the phase
        const double cycles = dfs * m;
        return std::polar(1.0, 2.0 * kPi * (cycles - std::floor(cycles)));
    }
};

PathKernel make_kernel(const Path& path, const WaveformParams& params, ChannelMode mode) {
    return {mode == ChannelMode::msml ? 1.0 + path.a : 1.0, params.f_s * path.tau,
            path.a * params.f_c / params.f_s};
}

void check_guard(const Path& path, const WaveformParams& params) {
    const double l = path.delay_samples(params);
    if (l < -1e-9) throw std::invalid_argument("path delay must be non-negative");
    if (l > params.n_cpp + 1e-9) throw std::invalid_argument("path delay exceeds the prefix length");
}

}  // namespace

CMatrix build_path_matrix(const Path& path, const WaveformParams& params, ChannelMode mode) {
    params.validate();
    check_guard(path, params);
    const int n = params.n;
    const int fold_start = n - params.n_cpp;
    const PathKernel k = make_kernel(path, params, mode);
    CMatrix h(n, n);
    for (int m = 0; m < n; ++m) {
        const Complex rot = k.rotation(m);
        for (int col = 0; col < n; ++col) {
            double g = k.g(m, col);
            if (col >= fold_start) g += k.g(m, col - n);
            h(m, col) = g * rot;
        }
    }
    return h;
}

CMatrix build_channel_matrix(const PathSet& paths, const WaveformParams& params, ChannelMode mode) {
    if (paths.empty()) throw std::invalid_argument("channel has no paths");
    CMatrix h = CMatrix::Zero(params.n, params.n);
    for (const Path& p : paths) h += p.h * build_path_matrix(p, params, mode);
    return h;
}

SymbolVector apply_channel(const CVector& x_cpp, const PathSet& paths, const WaveformParams& params,
                           ChannelMode mode, double noise_var, Rng& rng) {
    params.validate();
    if (paths.empty()) throw std::invalid_argument("apply_channel: empty path set");
    if (x_cpp.size() != params.n + params.n_cpp)
        throw std::invalid_argument("apply_channel: input length must equal n + n_cpp");
    if (noise_var < 0.0) throw std::invalid_argument("apply_channel: noise_var must be >= 0");
    const int n = params.n;
    const int ncpp = params.n_cpp;
    CVector y = CVector::Zero(n);
    for (const Path& path : paths) {
        check_guard(path, params);
        const PathKernel k = make_kernel(path, params, mode);
        for (int m = 0; m < n; ++m) {
            Complex acc{0.0, 0.0};
            // Sample index runs over the whole transmitted block, prefix included.
            for (int s = -ncpp; s < n; ++s) acc += x_cpp[s + ncpp] * k.g(m, s);
            y[m] += path.h * k.rotation(m) * acc;
        }
    }
    if (noise_var > 0.0) y += complex_gaussian_vector(rng, n, noise_var);
    return {Domain::time, y};
}

double carrier_for_doppler_order(const WaveformParams& params, int q_max, double doppler_order) {
    if (!(doppler_order > 0.0)) throw std::invalid_argument("doppler_order must be positive");
    if (q_max < 1) throw std::invalid_argument("carrier_for_doppler_order: q_max must be >= 1");
    return q_max * params.f_s / (params.n * doppler_order);
}

WaveformParams with_channel_carrier(const WaveformParams& params, const ChannelConfig& config) {
    WaveformParams out = params;
    if (config.doppler_order > 0.0 && config.q_max > 0)
        out.f_c = carrier_for_doppler_order(params, config.q_max, config.doppler_order);
    return out;
}

double doppler_factor_for_dfs(const WaveformParams& params, int q) {
    return q * (params.f_s / (params.n * params.f_c));
}

PathSet sample_random_channel(const ChannelConfig& config, const WaveformParams& params, Rng& rng) {
    config.validate(params.n);
    if (config.l_max > params.n_cpp) throw std::invalid_argument("channel: l_max exceeds the prefix length");

    std::vector<int> delays(config.p);
    if (config.distinct_delays) {
        std::vector<int> pool(config.l_max + 1);
        std::iota(pool.begin(), pool.end(), 0);
        // Partial Fisher-Yates; the explicit loop keeps the draw order fixed.
        for (int i = 0; i < config.p; ++i) {
            std::uniform_int_distribution<int> pick(i, config.l_max);
            std::swap(pool[i], pool[pick(rng)]);
            delays[i] = pool[i];
        }
    } else {
        std::uniform_int_distribution<int> pick(0, config.l_max);
        for (int& l : delays) l = pick(rng);
    }

    std::uniform_int_distribution<int> dfs(-config.q_max, config.q_max);
    std::vector<int> qs(config.p);
    for (int& q : qs) q = dfs(rng);

    const double alpha = config.effective_decay_alpha();
    std::vector<double> power(config.p);
    double total = 0.0;
    for (int i = 0; i < config.p; ++i) {
        power[i] = std::exp(-alpha * delays[i]);
        total += power[i];
    }

    PathSet paths(config.p);
    for (int i = 0; i < config.p; ++i) {
        paths[i].tau = delays[i] / params.f_s;
        paths[i].a = doppler_factor_for_dfs(params, qs[i]);
        paths[i].h = complex_gaussian(rng, power[i] / total);
    }
    return paths;
}

}  // namespace afdm
