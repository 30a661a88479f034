#include "afdm/link_sim.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace afdm {

SymbolVector qpsk_map(const std::vector<std::uint8_t>& bits) {
    if (bits.size() % 2 != 0) throw std::invalid_argument("qpsk_map: bit count must be even");
    CVector s(static_cast<Eigen::Index>(bits.size() / 2));
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        const double re = bits[2 * k] ? -M_SQRT1_2 : M_SQRT1_2;
        const double im = bits[2 * k + 1] ? -M_SQRT1_2 : M_SQRT1_2;
        s[k] = {re, im};
    }
    return {Domain::daft, s};
}

std::vector<std::uint8_t> qpsk_demap(const SymbolVector& s) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * s.size()));
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        bits[2 * k] = s.values[k].real() < 0.0;
        bits[2 * k + 1] = s.values[k].imag() < 0.0;
    }
    return bits;
}

namespace {

// Solves (G + I/snr) x = H^H z with G = H^H H stored in the lower triangle.
CVector mmse_solve(const CMatrix& gram_lower, const CMatrix& h, const CVector& z, double snr) {
    CMatrix a = gram_lower;
    a.diagonal().array() += 1.0 / snr;
    Eigen::LLT<CMatrix, Eigen::Lower> llt(a);
    if (llt.info() != Eigen::Success) throw NumericalError("mmse: Cholesky factorization failed");
    return llt.solve(h.adjoint() * z);
}

CMatrix gram_lower(const CMatrix& h) {
    CMatrix g = CMatrix::Zero(h.cols(), h.cols());
    g.selfadjointView<Eigen::Lower>().rankUpdate(h.adjoint());
    return g;
}

}  // namespace

SymbolVector mmse_equalize(const SymbolVector& z, const CfrMatrix& cfr, double snr) {
    if (!(snr > 0.0)) throw std::invalid_argument("mmse: snr must be positive");
    const CMatrix& h = cfr.entries;
    if (h.rows() != z.size()) throw std::invalid_argument("mmse: dimension mismatch");
    return {Domain::daft, mmse_solve(gram_lower(h), h, z.values, snr)};
}

double nmse(const CfrMatrix& estimate, const CfrMatrix& truth) {
    if (estimate.entries.rows() != truth.entries.rows() || estimate.entries.cols() != truth.entries.cols())
        throw std::invalid_argument("nmse: dimension mismatch");
    const double den = truth.entries.squaredNorm();
    if (den == 0.0) throw std::invalid_argument("nmse: true CFR is zero");
    return (estimate.entries - truth.entries).squaredNorm() / den;
}

std::string to_string(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::omp: return "omp";
        case EstimatorKind::imi: return "imi";
        case EstimatorKind::ece: return "ece";
        case EstimatorKind::oracle: return "oracle";
        case EstimatorKind::ideal: return "ideal";
    }
    return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
    if (name == "omp") return EstimatorKind::omp;
    if (name == "imi") return EstimatorKind::imi;
    if (name == "ece") return EstimatorKind::ece;
    if (name == "oracle") return EstimatorKind::oracle;
    if (name == "ideal") return EstimatorKind::ideal;
    throw std::invalid_argument("unknown estimator '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    base.validate();
    channel.validate(base.n);
    if (channel.l_max > base.n_cpp) throw std::invalid_argument("channel: l_max exceeds the prefix length");
    if (waveforms.empty()) throw std::invalid_argument("experiment: no waveform selected");
    if (estimators.empty()) throw std::invalid_argument("experiment: no estimator selected");
    if (snr_db.empty()) throw std::invalid_argument("experiment: empty SNR grid");
    if (trials < 1) throw std::invalid_argument("experiment: trials must be >= 1");
    if (workers < 1) throw std::invalid_argument("experiment: workers must be >= 1");
    if (imi_levels < 1) throw std::invalid_argument("experiment: imi_levels must be >= 1");
    if (omp_known_p < 0) throw std::invalid_argument("experiment: omp known_p must be >= 0");
    if (omp_known_p == 0 && !(omp_residual_tol > 0.0))
        throw std::invalid_argument("experiment: residual stopping needs residual_tol > 0");
    for (int p : n_p)
        if (p < 1 || p > base.n) throw std::invalid_argument("experiment: n_p must lie in [1, n]");
    if (placement == PilotPlacement::single_first)
        for (int p : n_p)
            if (p != 1) throw std::invalid_argument("experiment: single-first placement needs n_p = 1");
    for (EstimatorKind e : estimators)
        if ((e == EstimatorKind::omp || e == EstimatorKind::oracle) && n_p.empty())
            throw std::invalid_argument("experiment: " + to_string(e) + " needs at least one n_p");
}

ResultTable::ResultTable(std::vector<SeriesKey> keys, int trials, int bits_per_trial)
    : keys_(std::move(keys)), trials_(trials), bits_per_trial_(bits_per_trial) {
    nmse_.assign(keys_.size() * static_cast<std::size_t>(trials_), std::numeric_limits<double>::quiet_NaN());
    errors_.assign(keys_.size() * static_cast<std::size_t>(trials_), -1);
}

int ResultTable::find(WaveformKind w, EstimatorKind e, int n_p, double snr_db) const {
    for (std::size_t k = 0; k < keys_.size(); ++k) {
        const SeriesKey& s = keys_[k];
        if (s.waveform == w && s.estimator == e && s.n_p == n_p && s.snr_db == snr_db) return static_cast<int>(k);
    }
    return -1;
}

void ResultTable::record(int key, int trial, double value, int bit_errors) {
    nmse_[slot(key, trial)] = value;
    errors_[slot(key, trial)] = bit_errors;
}

SeriesStats ResultTable::stats(int key) const {
    SeriesStats s;
    s.trials = trials_;
    double sum = 0.0, sum2 = 0.0, bsum = 0.0, bsum2 = 0.0;
    int ok = 0;
    for (int t = 0; t < trials_; ++t) {
        const int e = errors_[slot(key, t)];
        const double v = nmse_[slot(key, t)];
        if (e < 0 || std::isnan(v)) {
            ++s.failures;
            continue;
        }
        ++ok;
        sum += v;
        sum2 += v * v;
        s.bit_errors += e;
        s.bits += bits_per_trial_;
        const double b = static_cast<double>(e) / bits_per_trial_;
        bsum += b;
        bsum2 += b * b;
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (ok == 0) {
        s.nmse_mean = s.nmse_stderr = s.ber = s.ber_stderr = nan;
        return s;
    }
    s.nmse_mean = sum / ok;
    s.ber = static_cast<double>(s.bit_errors) / static_cast<double>(s.bits);
    if (ok > 1) {
        const double var = std::max(0.0, (sum2 - sum * sum / ok) / (ok - 1));
        const double bvar = std::max(0.0, (bsum2 - bsum * bsum / ok) / (ok - 1));
        s.nmse_stderr = std::sqrt(var / ok);
        s.ber_stderr = std::sqrt(bvar / ok);
    }
    return s;
}

namespace {

template <class F>
PairedDifference paired(int trials, F diff) {
    PairedDifference d;
    double sum = 0.0, sum2 = 0.0;
    for (int t = 0; t < trials; ++t) {
        double v;
        if (!diff(t, v)) continue;
        ++d.pairs;
        sum += v;
        sum2 += v * v;
    }
    if (d.pairs == 0) {
        d.mean = d.stderr_ = std::numeric_limits<double>::quiet_NaN();
        return d;
    }
    d.mean = sum / d.pairs;
    if (d.pairs > 1) d.stderr_ = std::sqrt(std::max(0.0, (sum2 - sum * sum / d.pairs) / (d.pairs - 1)) / d.pairs);
    return d;
}

}  // namespace

PairedDifference ResultTable::paired_nmse(int a, int b) const {
    return paired(trials_, [&](int t, double& v) {
        const double x = nmse_[slot(a, t)], y = nmse_[slot(b, t)];
        if (std::isnan(x) || std::isnan(y)) return false;
        v = x - y;
        return true;
    });
}

PairedDifference ResultTable::paired_ber(int a, int b) const {
    return paired(trials_, [&](int t, double& v) {
        const int x = errors_[slot(a, t)], y = errors_[slot(b, t)];
        if (x < 0 || y < 0) return false;
        v = static_cast<double>(x - y) / bits_per_trial_;
        return true;
    });
}

namespace {

struct PilotGroup {
    int n_p;
    Dictionary dict;
    SymbolVector symbol;
};

struct WaveformSetup {
    WaveformKind kind;
    DaftTransform daft;
    std::vector<PilotGroup> multi;  // OMP / oracle, one per n_p
    bool has_single = false;
    PilotGroup single;              // IMI / ECE
    IndexMatrices psi;
    bool ece_ok = false;
};

bool uses(const ExperimentConfig& c, EstimatorKind e) {
    for (EstimatorKind k : c.estimators)
        if (k == e) return true;
    return false;
}

int count_bit_errors(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
    int e = 0;
    for (std::size_t i = 0; i < a.size(); ++i) e += a[i] != b[i];
    return e;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const WaveformParams carrier = with_channel_carrier(config.base, config.channel);
    const int n = carrier.n;
    const bool need_multi = uses(config, EstimatorKind::omp) || uses(config, EstimatorKind::oracle);
    const bool need_single = uses(config, EstimatorKind::imi) || uses(config, EstimatorKind::ece);

    DictionaryOptions dopt;
    dopt.mode = config.channel.mode;
    std::vector<WaveformSetup> setups;
    for (WaveformKind kind : config.waveforms) {
        const WaveformParams p = preset_params(kind, n, carrier.n_cpp, carrier.f_s, carrier.f_c,
                                               config.channel.q_max, carrier.c2);
        WaveformSetup s{kind, DaftTransform(p), {}, false, {}, {}, false};
        if (need_multi || need_single) {
            const PilotSpec first = make_pilot(n, 1, PilotPlacement::single_first, config.seed);
            Dictionary base = build_channel_dictionary(first, p, config.channel, dopt);
            if (need_multi)
                for (int np : config.n_p) {
                    const PilotSpec pilot = make_pilot(n, np, config.placement, config.seed);
                    s.multi.push_back({np, with_pilot(base, pilot), training_symbol(pilot)});
                }
            if (need_single) {
                s.has_single = true;
                s.psi = build_index_matrices(base, config.imi_levels);
                try {
                    check_ece_applicable(base, s.psi);
                    s.ece_ok = true;
                } catch (const AmbiguityError&) {
                    s.ece_ok = false;
                }
                s.single = {1, std::move(base), training_symbol(first)};
            }
        }
        setups.push_back(std::move(s));
    }

    std::vector<SeriesKey> keys;
    for (WaveformKind w : config.waveforms)
        for (EstimatorKind e : config.estimators) {
            std::vector<int> nps;
            if (e == EstimatorKind::omp || e == EstimatorKind::oracle) nps = config.n_p;
            else if (e == EstimatorKind::ideal) nps = {0};
            else nps = {1};
            for (int np : nps)
                for (double snr : config.snr_db) keys.push_back({w, e, np, snr});
        }
    ResultTable table(std::move(keys), config.trials, 2 * n);

    std::atomic<int> next{0};
    std::atomic<long long> ece_failures{0}, ties{0}, rank_warn{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;

    auto run_trial = [&](int t) {
        Rng rng = make_substream(config.seed, static_cast<std::uint64_t>(t));
        const PathSet paths = sample_random_channel(config.channel, carrier, rng);
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * n));
        std::uniform_int_distribution<int> coin(0, 1);
        for (auto& b : bits) b = static_cast<std::uint8_t>(coin(rng));
        const CVector w_pilot = complex_gaussian_vector(rng, n, 1.0);
        const CVector w_data = complex_gaussian_vector(rng, n, 1.0);
        const SymbolVector s_data = qpsk_map(bits);
        const CMatrix h_time = build_channel_matrix(paths, carrier, config.channel.mode);

        for (const WaveformSetup& ws : setups) {
            const CMatrix& a = ws.daft.matrix();
            const CfrMatrix truth{ws.daft.conjugate(h_time), CfrProvenance::total};
            const CVector nz_pilot = a * w_pilot;
            const CVector nz_data = a * w_data;
            const CVector clean_data = truth.entries * s_data.values;
            const CMatrix truth_gram = gram_lower(truth.entries);

            std::vector<int> support;
            const Dictionary* any_dict = !ws.multi.empty() ? &ws.multi.front().dict
                                         : ws.has_single ? &ws.single.dict : nullptr;
            if (any_dict)
                for (const Path& p : paths) {
                    const int c = any_dict->column_of(static_cast<int>(std::lround(p.delay_samples(carrier))),
                                                      static_cast<int>(std::lround(p.normalized_dfs(carrier))));
                    if (c >= 0) support.push_back(c);
                }

            for (double snr_db : config.snr_db) {
                const double snr = std::pow(10.0, snr_db / 10.0);
                const double sigma = std::sqrt(1.0 / snr);
                const SymbolVector z_data{Domain::daft, clean_data + sigma * nz_data};

                auto score = [&](EstimatorKind e, int np, const EstimationResult& r) {
                    const int key = table.find(ws.kind, e, np, snr_db);
                    const double err = nmse(r.cfr_estimate, truth);
                    const CVector sh = mmse_solve(gram_lower(r.cfr_estimate.entries), r.cfr_estimate.entries,
                                                  z_data.values, snr);
                    table.record(key, t, err, count_bit_errors(qpsk_demap({Domain::daft, sh}), bits));
                    ties += r.tie_warnings;
                    rank_warn += r.rank_deficient ? 1 : 0;
                };

                for (EstimatorKind e : config.estimators) {
                    if (e == EstimatorKind::ideal) {
                        const CVector sh = mmse_solve(truth_gram, truth.entries, z_data.values, snr);
                        table.record(table.find(ws.kind, e, 0, snr_db), t, 0.0,
                                     count_bit_errors(qpsk_demap({Domain::daft, sh}), bits));
                    } else if (e == EstimatorKind::omp || e == EstimatorKind::oracle) {
                        for (const PilotGroup& g : ws.multi) {
                            const SymbolVector zp{Domain::daft, truth.entries * g.symbol.values + sigma * nz_pilot};
                            if (e == EstimatorKind::omp) {
                                OmpStop stop;
                                stop.known_p = config.omp_known_p;
                                stop.residual_tol = config.omp_residual_tol * sigma * std::sqrt(static_cast<double>(n));
                                score(e, g.n_p, omp_estimate(zp, g.dict, stop));
                            } else {
                                score(e, g.n_p, support_ls_estimate(zp, g.dict, support));
                            }
                        }
                    } else {
                        const PilotGroup& g = ws.single;
                        const SymbolVector zp{Domain::daft, truth.entries * g.symbol.values + sigma * nz_pilot};
                        if (e == EstimatorKind::ece) {
                            if (!ws.ece_ok) {
                                ++ece_failures;
                                continue;  // slot stays marked as failed
                            }
                            EceOptions o;
                            o.max_paths = config.channel.p;
                            o.noise_std = sigma;
                            score(e, 1, ece_estimate(zp, g.dict, ws.psi, o));
                        } else {
                            ImiOptions o;
                            o.max_paths = config.imi_known_p ? config.channel.p : 0;
                            o.noise_std = sigma;
                            score(e, 1, imi_estimate(zp, g.dict, ws.psi, o));
                        }
                    }
                }
            }
        }
    };

    auto worker = [&]() {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= config.trials) return;
            try {
                run_trial(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
                next = config.trials;
                return;
            }
        }
    };

    const int nworkers = std::min(config.workers, config.trials);
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nworkers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    table.ece_failures = ece_failures;
    table.tie_warnings = ties;
    table.rank_warnings = rank_warn;
    table.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return table;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
}

std::string snr_str(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

}  // namespace

std::string nmse_csv(const ResultTable& table) {
    std::ostringstream os;
    os << "waveform,estimator,n_p,snr_db,trials,failures,nmse_mean,nmse_stderr\n";
    for (std::size_t k = 0; k < table.keys().size(); ++k) {
        const SeriesKey& key = table.keys()[k];
        const SeriesStats s = table.stats(static_cast<int>(k));
        os << to_string(key.waveform) << ',' << to_string(key.estimator) << ',' << key.n_p << ','
           << snr_str(key.snr_db) << ',' << s.trials << ',' << s.failures << ',' << num(s.nmse_mean) << ','
           << num(s.nmse_stderr) << '\n';
    }
    return os.str();
}

std::string ber_csv(const ResultTable& table) {
    std::ostringstream os;
    os << "waveform,estimator,n_p,snr_db,trials,failures,bit_errors,bits,ber,ber_stderr\n";
    for (std::size_t k = 0; k < table.keys().size(); ++k) {
        const SeriesKey& key = table.keys()[k];
        const SeriesStats s = table.stats(static_cast<int>(k));
        os << to_string(key.waveform) << ',' << to_string(key.estimator) << ',' << key.n_p << ','
           << snr_str(key.snr_db) << ',' << s.trials << ',' << s.failures << ',' << s.bit_errors << ',' << s.bits
           << ',' << num(s.ber) << ',' << num(s.ber_stderr) << '\n';
    }
    return os.str();
}

}  // namespace afdm
