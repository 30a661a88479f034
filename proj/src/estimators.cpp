#include "afdm/estimators.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace afdm {

std::string to_string(PilotPlacement placement) {
    switch (placement) {
        case PilotPlacement::single_first: return "single-first";
        case PilotPlacement::equispaced: return "equispaced";
        case PilotPlacement::contiguous: return "contiguous";
    }
    return "unknown";
}

PilotPlacement parse_pilot_placement(std::string_view name) {
    if (name == "single-first") return PilotPlacement::single_first;
    if (name == "equispaced") return PilotPlacement::equispaced;
    if (name == "contiguous") return PilotPlacement::contiguous;
    throw std::invalid_argument("unknown pilot placement '" + std::string(name) + "'");
}

std::vector<int> PilotSpec::positions() const {
    std::vector<int> pos(static_cast<std::size_t>(n_p));
    for (int i = 0; i < n_p; ++i) {
        switch (placement) {
            case PilotPlacement::single_first:
            case PilotPlacement::contiguous: pos[i] = i; break;
            // floor(i n / n_p) spreads any pilot count evenly, not only divisors of n.
            case PilotPlacement::equispaced:
                pos[i] = static_cast<int>((static_cast<long long>(i) * n) / n_p);
                break;
        }
    }
    return pos;
}

void PilotSpec::validate() const {
    if (n < 1) throw std::invalid_argument("pilot: n must be >= 1");
    if (n_p < 1 || n_p > n) throw std::invalid_argument("pilot: n_p must lie in [1, n]");
    if (placement == PilotPlacement::single_first && n_p != 1)
        throw std::invalid_argument("pilot: single-first placement requires n_p = 1");
    if (pilot_values.size() != n_p) throw std::invalid_argument("pilot: need one value per pilot");
    for (Eigen::Index i = 0; i < pilot_values.size(); ++i)
        if (std::abs(std::abs(pilot_values[i]) - 1.0) > 1e-9)
            throw std::invalid_argument("pilot: values must have unit modulus");
}

PilotSpec make_pilot(int n, int n_p, PilotPlacement placement, std::uint64_t seed) {
    PilotSpec p;
    p.n = n;
    p.n_p = n_p;
    p.placement = placement;
    if (n_p < 1 || n_p > n) throw std::invalid_argument("pilot: n_p must lie in [1, n]");
    p.pilot_values = CVector::Ones(n_p);
    if (placement != PilotPlacement::single_first) {
        Rng rng = make_substream(seed, 0x70696c6f74ull);  // "pilot"
        std::uniform_real_distribution<double> phase(0.0, 1.0);
        for (int i = 0; i < n_p; ++i) p.pilot_values[i] = std::polar(1.0, 2.0 * kPi * phase(rng));
    }
    p.validate();
    return p;
}

SymbolVector training_symbol(const PilotSpec& pilot) {
    pilot.validate();
    const double amp = std::sqrt(static_cast<double>(pilot.n) / pilot.n_p);
    CVector s = CVector::Zero(pilot.n);
    const std::vector<int> pos = pilot.positions();
    for (int i = 0; i < pilot.n_p; ++i) s[pos[i]] = amp * pilot.pilot_values[i];
    return {Domain::daft, s};
}

int Dictionary::column_of(int l, int q) const {
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (grid[j].l == l && grid[j].q == q) return static_cast<int>(j);
    return -1;
}

namespace {

CMatrix columns_for(const std::vector<CMatrix>& atoms, const SymbolVector& s) {
    CMatrix cols(s.size(), static_cast<Eigen::Index>(atoms.size()));
    for (std::size_t j = 0; j < atoms.size(); ++j) cols.col(static_cast<Eigen::Index>(j)) = atoms[j] * s.values;
    return cols;
}

struct LsSolution {
    CVector x;
    bool rank_deficient = false;
};

LsSolution solve_ls(const CMatrix& a, const CVector& z) {
    LsSolution out;
    Eigen::ColPivHouseholderQR<CMatrix> qr(a);
    if (qr.rank() == a.cols()) {
        out.x = qr.solve(z);
        return out;
    }
    // Tikhonov fallback; the caller reports the deficiency.
    out.rank_deficient = true;
    const CMatrix g = a.adjoint() * a;
    const double lambda = 1e-10 * std::max(g.diagonal().real().maxCoeff(), 1e-300);
    const CMatrix reg = g + lambda * CMatrix::Identity(g.rows(), g.cols());
    Eigen::LDLT<CMatrix> ldlt(reg);
    if (ldlt.info() != Eigen::Success) throw NumericalError("least squares: regularized solve failed");
    out.x = ldlt.solve(a.adjoint() * z);
    return out;
}

CMatrix gather(const CMatrix& cols, const std::vector<int>& support) {
    CMatrix a(cols.rows(), static_cast<Eigen::Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) a.col(static_cast<Eigen::Index>(k)) = cols.col(support[k]);
    return a;
}

// Fills paths and the reconstructed CFR from a support and its gains.
void finish(EstimationResult& res, const Dictionary& dict, const std::vector<int>& support, const CVector& gains) {
    res.paths.clear();
    const int n = dict.params.n;
    res.cfr_estimate.provenance = CfrProvenance::total;
    res.cfr_estimate.entries = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < support.size(); ++k) {
        const GridPoint& g = dict.grid[static_cast<std::size_t>(support[k])];
        res.paths.push_back({support[k], g.l, g.q, g.tau, g.a, gains[static_cast<Eigen::Index>(k)]});
        if (dict.has_atoms()) res.cfr_estimate.entries += gains[static_cast<Eigen::Index>(k)] * (*dict.atoms)[support[k]];
    }
}

void require_observation(const SymbolVector& z, const Dictionary& dict) {
    if (z.domain != Domain::daft) throw std::invalid_argument("estimator: observation must be DAFT-domain");
    if (z.size() != dict.columns.rows()) throw std::invalid_argument("estimator: observation length mismatch");
    if (dict.size() == 0) throw std::invalid_argument("estimator: empty dictionary");
}

int argmax_abs(const CVector& v, const std::vector<int>& among) {
    int best = -1;
    double best_mag = -1.0;
    for (int i : among) {
        const double m = std::abs(v[i]);
        if (m > best_mag) {
            best_mag = m;
            best = i;
        }
    }
    return best;
}

}  // namespace

Dictionary build_dictionary(const PilotSpec& pilot, double tau_max, double a_max, double delta_a,
                            const WaveformParams& params, const DictionaryOptions& options) {
    params.validate();
    pilot.validate();
    if (pilot.n != params.n) throw std::invalid_argument("dictionary: pilot length differs from n");
    if (!(delta_a > 0.0)) throw std::invalid_argument("dictionary: delta_a must be positive");
    if (tau_max < 0.0 || a_max < 0.0) throw std::invalid_argument("dictionary: tau_max and a_max must be >= 0");

    Dictionary d;
    d.pilot = pilot;
    d.params = params;
    d.mode = options.mode;
    d.n_tau = static_cast<int>(std::lround(params.f_s * tau_max)) + 1;
    d.n_a = static_cast<int>(std::lround(2.0 * a_max / delta_a)) + 1;
    const long long total = static_cast<long long>(d.n_tau) * d.n_a;
    if (total > options.column_cap)
        throw std::invalid_argument("dictionary: " + std::to_string(total) + " columns exceed the cap of " +
                                    std::to_string(options.column_cap));

    const DaftTransform daft(params);
    auto atoms = std::make_shared<std::vector<CMatrix>>();
    atoms->reserve(static_cast<std::size_t>(total));
    for (int it = 0; it < d.n_tau; ++it) {
        for (int ia = 0; ia < d.n_a; ++ia) {
            GridPoint g;
            g.tau = it / params.f_s;
            g.a = (ia - 0.5 * (d.n_a - 1)) * delta_a;
            g.l = it;
            g.q = static_cast<int>(std::lround(g.a * params.n * params.f_c / params.f_s));
            Path p;
            p.tau = g.tau;
            p.a = g.a;
            atoms->push_back(daft.conjugate(build_path_matrix(p, params, options.mode)));
            d.grid.push_back(g);
        }
    }
    d.columns = columns_for(*atoms, training_symbol(pilot));
    d.atoms = std::move(atoms);
    return d;
}

Dictionary build_channel_dictionary(const PilotSpec& pilot, const WaveformParams& params,
                                    const ChannelConfig& channel, const DictionaryOptions& options) {
    channel.validate(params.n);
    const double step = doppler_factor_for_dfs(params, 1);
    return build_dictionary(pilot, channel.l_max / params.f_s, channel.q_max * step, step, params, options);
}

Dictionary with_pilot(const Dictionary& dict, const PilotSpec& pilot) {
    if (!dict.has_atoms()) throw std::invalid_argument("with_pilot: dictionary has no atoms");
    if (pilot.n != dict.params.n) throw std::invalid_argument("with_pilot: pilot length differs from n");
    Dictionary d = dict;
    d.pilot = pilot;
    d.columns = columns_for(*dict.atoms, training_symbol(pilot));
    return d;
}

double mip(const Dictionary& dict) { return mip(dict.columns); }

std::vector<std::pair<int, int>> IndexMatrices::ambiguous_cells() const {
    std::map<int, int> count;
    for (int c = 0; c < cells(); ++c) ++count[at(0, c)];
    std::vector<std::pair<int, int>> out;
    for (int l = 0; l <= l_max; ++l)
        for (int q = -q_max; q <= q_max; ++q)
            if (count[at(0, l, q)] > 1) out.emplace_back(l, q);
    return out;
}

IndexMatrices build_index_matrices(const Dictionary& dict, int levels) {
    if (levels < 1) throw std::invalid_argument("index matrices: levels must be >= 1");
    const int n = static_cast<int>(dict.columns.rows());
    if (levels > n) throw std::invalid_argument("index matrices: levels exceed n");
    if (dict.n_a % 2 != 1) throw std::invalid_argument("index matrices: Doppler grid must be symmetric");
    IndexMatrices psi;
    psi.levels = levels;
    psi.l_max = dict.n_tau - 1;
    psi.q_max = (dict.n_a - 1) / 2;
    for (int c = 0; c < psi.cells(); ++c) {
        const GridPoint& g = dict.grid[static_cast<std::size_t>(c)];
        if (psi.column(g.l, g.q) != c) throw std::invalid_argument("index matrices: dictionary grid is not the (l, Q) grid");
    }
    psi.index.assign(static_cast<std::size_t>(levels) * psi.cells(), 0);
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int c = 0; c < psi.cells(); ++c) {
        const CVector col = dict.columns.col(c);
        std::iota(order.begin(), order.end(), 0);
        std::partial_sort(order.begin(), order.begin() + levels, order.end(), [&](int a, int b) {
            const double ma = std::abs(col[a]);
            const double mb = std::abs(col[b]);
            return ma != mb ? ma > mb : a < b;
        });
        for (int k = 0; k < levels; ++k) psi.index[static_cast<std::size_t>(k) * psi.cells() + c] = order[k];
    }
    return psi;
}

IndexMatrices build_index_matrices(const WaveformParams& params, const ChannelConfig& channel, int levels,
                                   const PilotSpec& pilot) {
    DictionaryOptions opt;
    opt.mode = channel.mode;
    return build_index_matrices(build_channel_dictionary(pilot, params, channel, opt), levels);
}

void check_ece_applicable(const Dictionary& dict, const IndexMatrices& psi) {
    if (dict.pilot.placement != PilotPlacement::single_first)
        throw std::invalid_argument("ece: requires the single-first pilot");
    const int n = dict.params.n;
    std::map<int, std::vector<int>> by_position;
    std::ostringstream moved;
    int moved_count = 0;
    for (int c = 0; c < psi.cells(); ++c) {
        const GridPoint& g = dict.grid[static_cast<std::size_t>(c)];
        const int nominal = cfr_support_offset(g.l, g.q, dict.params) % n;
        by_position[nominal].push_back(c);
        if (psi.at(0, c) != nominal) {
            if (moved_count < 4) moved << " (" << g.l << "," << g.q << "): " << nominal << "->" << psi.at(0, c);
            ++moved_count;
        }
    }
    for (const auto& [pos, cells] : by_position) {
        if (cells.size() > 1) {
            const GridPoint& a = dict.grid[static_cast<std::size_t>(cells[0])];
            const GridPoint& b = dict.grid[static_cast<std::size_t>(cells[1])];
            throw AmbiguityError("ece: cells (" + std::to_string(a.l) + "," + std::to_string(a.q) + ") and (" +
                                 std::to_string(b.l) + "," + std::to_string(b.q) + ") share peak position " +
                                 std::to_string(pos));
        }
    }
    if (moved_count > 0)
        throw AmbiguityError("ece: " + std::to_string(moved_count) +
                             " cells peak away from their nominal position;" + moved.str());
}

EstimationResult ece_estimate(const SymbolVector& z, const Dictionary& dict, const IndexMatrices& psi,
                              const EceOptions& options) {
    require_observation(z, dict);
    check_ece_applicable(dict, psi);
    if (options.max_paths < 1) throw std::invalid_argument("ece: max_paths must be >= 1");

    const double floor = 1e-6 * z.values.cwiseAbs().maxCoeff();
    const double thr = std::max(options.threshold_factor * options.noise_std, floor);
    std::vector<int> peaks;
    std::map<int, int> cell_at;
    for (int c = 0; c < psi.cells(); ++c) {
        const int pos = psi.at(0, c);
        cell_at[pos] = c;
        if (std::abs(z.values[pos]) > thr) peaks.push_back(pos);
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [&](int a, int b) { return std::abs(z.values[a]) > std::abs(z.values[b]); });
    if (static_cast<int>(peaks.size()) > options.max_paths) peaks.resize(static_cast<std::size_t>(options.max_paths));

    std::vector<int> support;
    CVector gains(static_cast<Eigen::Index>(peaks.size()));
    for (std::size_t k = 0; k < peaks.size(); ++k) {
        const int c = cell_at[peaks[k]];
        support.push_back(c);
        gains[static_cast<Eigen::Index>(k)] = z.values[peaks[k]] / dict.columns(peaks[k], c);
    }
    EstimationResult res;
    finish(res, dict, support, gains);
    res.iterations = static_cast<int>(support.size());
    const CVector r = z.values - gather(dict.columns, support) * gains;
    res.residual_norm = r.norm();
    res.residual_history = {z.values.norm(), res.residual_norm};
    return res;
}

EstimationResult imi_estimate(const SymbolVector& z, const Dictionary& dict, const IndexMatrices& psi,
                              const ImiOptions& options) {
    require_observation(z, dict);
    if (psi.cells() != dict.size()) throw std::invalid_argument("imi: index matrices do not match the dictionary");
    if (options.max_paths < 0) throw std::invalid_argument("imi: max_paths must be >= 0");

    const int cells = psi.cells();
    const bool threshold_mode = options.max_paths == 0;
    const int limit = threshold_mode ? cells : std::min(options.max_paths, cells);
    const double thr = options.noise_std > 0.0 ? options.threshold_factor * options.noise_std
                                               : 1e-9 * std::max(z.values.norm(), 1e-300);

    EstimationResult res;
    CVector r = z.values;
    std::vector<bool> taken(static_cast<std::size_t>(cells), false);
    std::vector<int> support;
    std::vector<Complex> gains;
    res.residual_history.push_back(r.norm());

    for (int it = 0; it < limit; ++it) {
        // Only positions that are still some free cell's first peak can start a detection.
        std::vector<int> valid;
        for (int c = 0; c < cells; ++c)
            if (!taken[c]) valid.push_back(psi.at(0, c));
        std::sort(valid.begin(), valid.end());
        valid.erase(std::unique(valid.begin(), valid.end()), valid.end());
        if (valid.empty()) break;
        const int omega = argmax_abs(r, valid);
        if (threshold_mode && std::abs(r[omega]) < thr) break;

        std::vector<int> cand;
        for (int lev = 0; lev < psi.levels && cand.empty(); ++lev)
            for (int c = 0; c < cells; ++c)
                if (!taken[c] && psi.at(lev, c) == omega) cand.push_back(c);
        if (cand.empty()) break;

        for (int lev = 1; lev < psi.levels && cand.size() > 1; ++lev) {
            double best = -1.0;
            for (int c : cand) best = std::max(best, std::abs(r[psi.at(lev, c)]));
            std::vector<int> keep;
            for (int c : cand)
                if (std::abs(r[psi.at(lev, c)]) >= best * (1.0 - 1e-12)) keep.push_back(c);
            cand.swap(keep);
        }
        if (cand.size() > 1) ++res.tie_warnings;
        // Columns are l-major, so the smallest column is lowest l then lowest Q.
        const int c = *std::min_element(cand.begin(), cand.end());

        Complex num{0.0, 0.0};
        double den = 0.0;
        for (int lev = 0; lev < psi.levels; ++lev) {
            const int i = psi.at(lev, c);
            num += std::conj(dict.columns(i, c)) * r[i];
            den += std::norm(dict.columns(i, c));
        }
        if (den == 0.0) break;
        const Complex h = num / den;
        r -= h * dict.columns.col(c);
        taken[c] = true;
        support.push_back(c);
        gains.push_back(h);
        res.residual_history.push_back(r.norm());
    }

    CVector x(static_cast<Eigen::Index>(gains.size()));
    for (std::size_t k = 0; k < gains.size(); ++k) x[static_cast<Eigen::Index>(k)] = gains[k];
    if (options.final_refit && !support.empty()) {
        const LsSolution ls = solve_ls(gather(dict.columns, support), z.values);
        x = ls.x;
        res.rank_deficient = ls.rank_deficient;
        r = z.values - gather(dict.columns, support) * x;
    }
    finish(res, dict, support, x);
    res.iterations = static_cast<int>(support.size());
    res.residual_norm = r.norm();
    return res;
}

EstimationResult omp_estimate(const SymbolVector& z, const Dictionary& dict, const OmpStop& stop) {
    require_observation(z, dict);
    if (stop.known_p < 0) throw std::invalid_argument("omp: known_p must be >= 0");
    if (stop.known_p == 0 && stop.residual_tol < 0.0) throw std::invalid_argument("omp: residual_tol must be >= 0");

    const Eigen::Index cols = dict.size();
    const RVector norms = dict.columns.colwise().norm().transpose();
    const int limit = stop.known_p > 0 ? static_cast<int>(std::min<Eigen::Index>(stop.known_p, cols))
                                       : static_cast<int>(std::min(cols, dict.columns.rows()));
    EstimationResult res;
    CVector r = z.values;
    std::vector<int> support;
    std::vector<bool> taken(static_cast<std::size_t>(cols), false);
    CVector x;
    res.residual_history.push_back(r.norm());

    for (int it = 0; it < limit; ++it) {
        if (stop.known_p == 0 && r.norm() <= stop.residual_tol) break;
        const CVector corr = dict.columns.adjoint() * r;
        int best = -1;
        double best_val = -1.0;
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (taken[j] || norms[j] == 0.0) continue;
            const double v = std::abs(corr[j]) / norms[j];
            if (v > best_val) {
                best_val = v;
                best = static_cast<int>(j);
            }
        }
        if (best < 0) break;
        taken[best] = true;
        support.push_back(best);
        const CMatrix a = gather(dict.columns, support);
        const LsSolution ls = solve_ls(a, z.values);
        res.rank_deficient = res.rank_deficient || ls.rank_deficient;
        x = ls.x;
        r = z.values - a * x;
        res.residual_history.push_back(r.norm());
    }
    if (support.empty()) x = CVector(0);
    finish(res, dict, support, x);
    res.iterations = static_cast<int>(support.size());
    res.residual_norm = r.norm();
    return res;
}

EstimationResult support_ls_estimate(const SymbolVector& z, const Dictionary& dict, const std::vector<int>& support) {
    require_observation(z, dict);
    for (int c : support)
        if (c < 0 || c >= dict.size()) throw std::invalid_argument("support_ls: column out of range");
    EstimationResult res;
    CVector x(0);
    CVector r = z.values;
    if (!support.empty()) {
        const CMatrix a = gather(dict.columns, support);
        const LsSolution ls = solve_ls(a, z.values);
        x = ls.x;
        res.rank_deficient = ls.rank_deficient;
        r = z.values - a * x;
    }
    finish(res, dict, support, x);
    res.iterations = 1;
    res.residual_norm = r.norm();
    res.residual_history = {z.values.norm(), res.residual_norm};
    return res;
}

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot open " + p.string());
    return in;
}

void expect_header(std::ifstream& in, const std::string& header, const std::string& name) {
    std::string line;
    if (!std::getline(in, line) || line != header)
        throw std::runtime_error(name + ": unexpected header, want '" + header + "'");
}

}  // namespace

void export_dictionary(const Dictionary& dict, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path base(dir);

    nlohmann::ordered_json meta;
    meta["schema"] = 1;
    meta["n"] = dict.params.n;
    meta["c1"] = dict.params.c1;
    meta["c2"] = dict.params.c2;
    meta["n_cpp"] = dict.params.n_cpp;
    meta["f_s"] = dict.params.f_s;
    meta["f_c"] = dict.params.f_c;
    meta["mode"] = to_string(dict.mode);
    meta["n_tau"] = dict.n_tau;
    meta["n_a"] = dict.n_a;
    meta["pilot"] = {{"n_p", dict.pilot.n_p}, {"placement", to_string(dict.pilot.placement)}};
    std::ofstream(base / "dictionary.json") << meta.dump(2) << "\n";

    std::ofstream grid(base / "grid.csv");
    grid << "column,tau_s,doppler_factor,l,q\n";
    for (std::size_t j = 0; j < dict.grid.size(); ++j) {
        const GridPoint& g = dict.grid[j];
        grid << j << ',' << fmt17(g.tau) << ',' << fmt17(g.a) << ',' << g.l << ',' << g.q << '\n';
    }

    std::ofstream pilot(base / "pilot.csv");
    pilot << "position,re,im\n";
    const std::vector<int> pos = dict.pilot.positions();
    for (int i = 0; i < dict.pilot.n_p; ++i)
        pilot << pos[i] << ',' << fmt17(dict.pilot.pilot_values[i].real()) << ','
              << fmt17(dict.pilot.pilot_values[i].imag()) << '\n';

    std::ofstream cols(base / "columns.csv");
    cols << "column,row,re,im\n";
    for (Eigen::Index j = 0; j < dict.columns.cols(); ++j)
        for (Eigen::Index i = 0; i < dict.columns.rows(); ++i)
            cols << j << ',' << i << ',' << fmt17(dict.columns(i, j).real()) << ',' << fmt17(dict.columns(i, j).imag())
                 << '\n';
    if (!cols) throw std::runtime_error("export_dictionary: write failed in " + dir);
}

Dictionary import_dictionary(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path base(dir);
    Dictionary d;
    {
        std::ifstream in = open_in(base / "dictionary.json");
        const nlohmann::json meta = nlohmann::json::parse(in);
        if (meta.at("schema").get<int>() != 1) throw std::runtime_error("dictionary.json: unsupported schema");
        d.params.n = meta.at("n").get<int>();
        d.params.c1 = meta.at("c1").get<double>();
        d.params.c2 = meta.at("c2").get<double>();
        d.params.n_cpp = meta.at("n_cpp").get<int>();
        d.params.f_s = meta.at("f_s").get<double>();
        d.params.f_c = meta.at("f_c").get<double>();
        d.params.validate();
        d.mode = parse_channel_mode(meta.at("mode").get<std::string>());
        d.n_tau = meta.at("n_tau").get<int>();
        d.n_a = meta.at("n_a").get<int>();
        d.pilot.n = d.params.n;
        d.pilot.n_p = meta.at("pilot").at("n_p").get<int>();
        d.pilot.placement = parse_pilot_placement(meta.at("pilot").at("placement").get<std::string>());
    }
    const int cols = d.n_tau * d.n_a;
    const int n = d.params.n;
    {
        std::ifstream in = open_in(base / "grid.csv");
        expect_header(in, "column,tau_s,doppler_factor,l,q", "grid.csv");
        std::string line;
        while (std::getline(in, line)) {
            const auto f = split_csv(line);
            if (f.size() != 5) throw std::runtime_error("grid.csv: malformed row '" + line + "'");
            d.grid.push_back({std::stod(f[1]), std::stod(f[2]), std::stoi(f[3]), std::stoi(f[4])});
        }
        if (static_cast<int>(d.grid.size()) != cols) throw std::runtime_error("grid.csv: column count mismatch");
    }
    {
        std::ifstream in = open_in(base / "pilot.csv");
        expect_header(in, "position,re,im", "pilot.csv");
        d.pilot.pilot_values = CVector(d.pilot.n_p);
        std::string line;
        int i = 0;
        while (std::getline(in, line)) {
            const auto f = split_csv(line);
            if (f.size() != 3 || i >= d.pilot.n_p) throw std::runtime_error("pilot.csv: malformed row '" + line + "'");
            d.pilot.pilot_values[i++] = {std::stod(f[1]), std::stod(f[2])};
        }
        if (i != d.pilot.n_p) throw std::runtime_error("pilot.csv: pilot count mismatch");
        d.pilot.validate();
    }
    {
        std::ifstream in = open_in(base / "columns.csv");
        expect_header(in, "column,row,re,im", "columns.csv");
        d.columns = CMatrix::Zero(n, cols);
        std::string line;
        long long rows = 0;
        while (std::getline(in, line)) {
            const auto f = split_csv(line);
            if (f.size() != 4) throw std::runtime_error("columns.csv: malformed row '" + line + "'");
            const int j = std::stoi(f[0]);
            const int i = std::stoi(f[1]);
            if (j < 0 || j >= cols || i < 0 || i >= n) throw std::runtime_error("columns.csv: index out of range");
            d.columns(i, j) = {std::stod(f[2]), std::stod(f[3])};
            ++rows;
        }
        if (rows != static_cast<long long>(n) * cols) throw std::runtime_error("columns.csv: entry count mismatch");
    }
    return d;
}

}  // namespace afdm
