#include "afdm/cli.hpp"

#include "afdm/cfr.hpp"
#include "afdm/config.hpp"
#include "afdm/estimators.hpp"
#include "afdm/io.hpp"
#include "afdm/link_sim.hpp"
#include "afdm/metrics.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <sstream>

namespace afdm::cli {

namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string fmt(const char* spec, double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// Creates `dir` and refuses to reuse a directory that already holds a run.
void prepare_output_dir(const std::string& dir) {
    std::error_code ec;
    if (fs::exists(fs::path(dir) / "manifest.json", ec))
        throw IoError("output directory '" + dir + "' already contains a manifest; refusing to overwrite");
    if (fs::exists(dir, ec) && !fs::is_directory(dir, ec)) throw IoError("output path '" + dir + "' is not a directory");
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
}

void write_output(const std::string& dir, const std::string& name, const std::string& content,
                  std::vector<std::string>& written) {
    try {
        write_text_file((fs::path(dir) / name).string(), content);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    written.push_back(name);
}

void write_manifest(const std::string& dir, const std::string& command, const nlohmann::ordered_json& config,
                    std::uint64_t seed, const std::vector<std::string>& outputs, double seconds) {
    nlohmann::ordered_json m;
    m["command"] = command;
    m["version"] = kVersion;
    m["csv_schema_version"] = kResultSchemaVersion;
    m["seed"] = seed;
    m["config"] = config;
    m["outputs"] = outputs;
    m["wall_clock_seconds"] = seconds;
    std::vector<std::string> ignored;
    write_output(dir, "manifest.json", m.dump(2) + "\n", ignored);
}

void emit(const std::string& text, const std::string& out_file, std::ostream& out) {
    if (out_file.empty()) {
        out << text;
        return;
    }
    try {
        write_text_file(out_file, text);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

std::vector<PlotSeries> plot_series(const ResultTable& table, bool ber) {
    std::map<std::string, PlotSeries> by_name;
    std::vector<std::string> order;
    for (std::size_t k = 0; k < table.keys().size(); ++k) {
        const SeriesKey& key = table.keys()[k];
        if (!ber && key.estimator == EstimatorKind::ideal) continue;
        std::string name = to_string(key.waveform) + "-" + to_string(key.estimator);
        if (key.estimator == EstimatorKind::omp || key.estimator == EstimatorKind::oracle)
            name += " Np=" + std::to_string(key.n_p);
        if (!by_name.count(name)) order.push_back(name);
        PlotSeries& s = by_name[name];
        s.name = name;
        const SeriesStats st = table.stats(static_cast<int>(k));
        s.x.push_back(key.snr_db);
        s.y.push_back(ber ? st.ber : st.nmse_mean);
    }
    std::vector<PlotSeries> out;
    for (const auto& n : order) out.push_back(by_name[n]);
    return out;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, bool plot, int workers,
                 std::ostream& out) {
    RunConfig rc = load_config(config_path);
    if (workers > 0) rc.experiment.workers = workers;
    prepare_output_dir(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    const ResultTable table = run_experiment(rc.experiment);
    std::vector<std::string> written;
    write_output(out_dir, "nmse.csv", nmse_csv(table), written);
    write_output(out_dir, "ber.csv", ber_csv(table), written);
    if (plot) {
        write_output(out_dir, "nmse.svg", svg_line_plot("NMSE", "SNR (dB)", "NMSE", plot_series(table, false), true),
                     written);
        write_output(out_dir, "ber.svg", svg_line_plot("BER", "SNR (dB)", "BER", plot_series(table, true), true),
                     written);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(out_dir, "simulate", nlohmann::ordered_json::parse(config_to_json(rc)), rc.experiment.seed, written,
                   secs);
    out << "simulate: " << rc.experiment.trials << " trials, " << table.keys().size() << " series, "
        << fmt("%.1f", secs) << " s -> " << out_dir << "\n";
    if (table.ece_failures > 0) out << "simulate: ECE inapplicable in " << table.ece_failures << " evaluations\n";
    if (table.tie_warnings > 0) out << "simulate: IMI broke " << table.tie_warnings << " unresolved ties\n";
    if (table.rank_warnings > 0) out << "simulate: " << table.rank_warnings << " rank-deficient LS solves\n";
    return ok;
}

struct CfrArgs {
    std::string waveform = "afdm";
    std::string mode = "msml";
    std::string out;
    std::uint64_t seed = 1;
    int paths = 5;
    double doppler_order = 1e-3;
    int n = 128;
    int n_cpp = 32;
    int l_max = 19;
    int q_max = 1;
    bool per_path = false;
};

int cmd_cfr(const CfrArgs& a, std::ostream& out) {
    ChannelConfig ch;
    WaveformParams base;
    try {
        ch.p = a.paths;
        ch.l_max = a.l_max;
        ch.q_max = a.q_max;
        ch.doppler_order = a.doppler_order;
        ch.mode = parse_channel_mode(a.mode);
        base.n = a.n;
        base.n_cpp = a.n_cpp;
        ch.validate(base.n);
        base.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const WaveformParams carrier = with_channel_carrier(base, ch);
    const WaveformParams params = preset_params(parse_waveform_kind(a.waveform), carrier.n, carrier.n_cpp, carrier.f_s,
                                                carrier.f_c, ch.q_max, carrier.c2);
    prepare_output_dir(a.out);
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng = make_substream(a.seed, 0);
    const PathSet paths = sample_random_channel(ch, params, rng);
    const DaftTransform daft(params);
    std::vector<std::string> written;
    write_output(a.out, "cfr.csv", cfr_magnitude_csv(compute_total_cfr(paths, daft, ch.mode)), written);
    write_output(a.out, "paths.csv", paths_csv(paths, params), written);
    if (a.per_path)
        for (std::size_t i = 0; i < paths.size(); ++i)
            write_output(a.out, "cfr_path" + std::to_string(i) + ".csv",
                         cfr_magnitude_csv(compute_path_cfr(build_path_matrix(paths[i], params, ch.mode), daft)),
                         written);
    nlohmann::ordered_json cfg{{"waveform", a.waveform}, {"mode", a.mode},     {"seed", a.seed},
                               {"paths", a.paths},       {"doppler_order", a.doppler_order},
                               {"n", a.n},               {"n_cpp", a.n_cpp},   {"l_max", a.l_max},
                               {"q_max", a.q_max},       {"c1", params.c1},    {"f_c", params.f_c}};
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(a.out, "cfr", cfg, a.seed, written, secs);
    out << "cfr: " << paths.size() << " paths, n=" << params.n << " -> " << a.out << "\n";
    return ok;
}

std::vector<WaveformParams> waveform_params(const RunConfig& rc) {
    const ExperimentConfig& ex = rc.experiment;
    const WaveformParams carrier = with_channel_carrier(ex.base, ex.channel);
    std::vector<WaveformParams> out;
    for (WaveformKind k : ex.waveforms)
        out.push_back(preset_params(k, carrier.n, carrier.n_cpp, carrier.f_s, carrier.f_c, ex.channel.q_max, carrier.c2));
    return out;
}

int cmd_metrics(const std::string& which, const std::string& config_path, const std::string& out_file,
                std::ostream& out) {
    const RunConfig rc = load_config(config_path);
    const ExperimentConfig& ex = rc.experiment;
    const std::vector<WaveformParams> params = waveform_params(rc);
    std::ostringstream os;

    if (which == "cop") {
        os << "waveform,cop_enumerated,cop_monte_carlo,cop_stderr,trials\n";
        for (std::size_t i = 0; i < params.size(); ++i) {
            Rng rng = make_substream(ex.seed, 0x636f70ull + i);
            const double exact = cop_enumerate(ex.channel, params[i]);
            const CopEstimate mc = cop_monte_carlo(ex.channel, params[i], rc.cop_trials, rng);
            os << to_string(ex.waveforms[i]) << ',' << fmt("%.10g", exact) << ',' << fmt("%.10g", mc.probability)
               << ',' << fmt("%.3e", mc.standard_error) << ',' << mc.samples << '\n';
        }
    } else if (which == "mip") {
        os << "waveform,n_p,placement,columns,mip\n";
        DictionaryOptions dopt;
        dopt.mode = ex.channel.mode;
        for (std::size_t i = 0; i < params.size(); ++i) {
            const Dictionary base = build_channel_dictionary(make_pilot(params[i].n, 1, PilotPlacement::single_first, ex.seed),
                                                             params[i], ex.channel, dopt);
            for (int np : ex.n_p) {
                const Dictionary d = with_pilot(base, make_pilot(params[i].n, np, ex.placement, ex.seed));
                os << to_string(ex.waveforms[i]) << ',' << np << ',' << to_string(ex.placement) << ',' << d.size()
                   << ',' << fmt("%.10f", mip(d)) << '\n';
            }
        }
    } else if (which == "diversity" || which == "pep") {
        const DiversityStudy st = run_diversity_study(ex.waveforms, ex.base, ex.channel, rc.diversity);
        if (which == "diversity") {
            os << "waveform,effective_rank,count,mean_effective_rank\n";
            for (std::size_t k = 0; k < st.kinds.size(); ++k) {
                std::map<int, int> hist;
                for (int r : st.diversity[k]) ++hist[r];
                for (const auto& [rank, count] : hist)
                    os << to_string(st.kinds[k]) << ',' << rank << ',' << count << ','
                       << fmt("%.6f", st.mean_diversity(k)) << '\n';
            }
        } else {
            os << "waveform,pep_bound,ccdf,median_pep_bound\n";
            for (std::size_t k = 0; k < st.kinds.size(); ++k) {
                std::vector<double> v = st.pep[k];
                std::sort(v.begin(), v.end());
                const double med = st.median_pep(k);
                for (std::size_t i = 0; i < v.size(); ++i)
                    os << to_string(st.kinds[k]) << ',' << fmt("%.6e", v[i]) << ','
                       << fmt("%.6f", static_cast<double>(v.size() - i) / v.size()) << ',' << fmt("%.6e", med) << '\n';
            }
        }
    } else {
        throw ConfigError("unknown metric '" + which + "'");
    }
    emit(os.str(), out_file, out);
    return ok;
}

int cmd_dict_build(const std::string& config_path, const std::string& out_dir, const std::string& waveform, int n_p,
                   std::ostream& out) {
    RunConfig rc = load_config(config_path);
    const ExperimentConfig& ex = rc.experiment;
    const WaveformKind kind = parse_waveform_kind(waveform);
    const WaveformParams carrier = with_channel_carrier(ex.base, ex.channel);
    const WaveformParams p = preset_params(kind, carrier.n, carrier.n_cpp, carrier.f_s, carrier.f_c, ex.channel.q_max,
                                           carrier.c2);
    const int np = n_p > 0 ? n_p : (ex.n_p.empty() ? p.n : ex.n_p.front());
    if (np > p.n) throw ConfigError("--n-p exceeds n");
    prepare_output_dir(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    DictionaryOptions dopt;
    dopt.mode = ex.channel.mode;
    const PilotPlacement placement = np == 1 ? PilotPlacement::single_first : ex.placement;
    const Dictionary d = build_channel_dictionary(make_pilot(p.n, np, placement, ex.seed), p, ex.channel, dopt);
    try {
        export_dictionary(d, out_dir);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::ordered_json cfg = nlohmann::ordered_json::parse(config_to_json(rc));
    cfg["dict"] = {{"waveform", waveform}, {"n_p", np}};
    write_manifest(out_dir, "dict build", cfg, ex.seed, {"dictionary.json", "grid.csv", "pilot.csv", "columns.csv"},
                   secs);
    out << "dict: " << d.size() << " columns (" << d.n_tau << " delays x " << d.n_a << " Doppler factors), mip "
        << fmt("%.6f", mip(d)) << " -> " << out_dir << "\n";
    return ok;
}

int cmd_dict_inspect(const std::string& dir, std::ostream& out) {
    Dictionary d;
    try {
        d = import_dictionary(dir);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    } catch (const std::exception& e) {
        throw IoError(e.what());
    }
    out << "n," << d.params.n << "\n";
    out << "c1," << fmt("%.10g", d.params.c1) << "\n";
    out << "mode," << to_string(d.mode) << "\n";
    out << "pilot," << to_string(d.pilot.placement) << "," << d.pilot.n_p << "\n";
    out << "columns," << d.size() << "\n";
    out << "grid," << d.n_tau << "x" << d.n_a << "\n";
    out << "tau_s," << fmt("%.6g", d.grid.front().tau) << "," << fmt("%.6g", d.grid.back().tau) << "\n";
    out << "doppler_factor," << fmt("%.6g", d.grid.front().a) << "," << fmt("%.6g", d.grid.back().a) << "\n";
    out << "mip," << fmt("%.10f", mip(d)) << "\n";
    return ok;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"AFDM / OCDM / OFDM simulation over multi-scale multi-lag channels", "afdm"};
    app.require_subcommand(1);

    std::string config_path, out_dir, in_dir, out_file, dict_waveform = "afdm";
    bool plot = false;
    int workers = 0;
    int dict_np = 0;

    auto* sim = app.add_subcommand("simulate", "Run the Monte-Carlo link simulation");
    sim->add_option("--config", config_path, "JSON configuration")->required();
    sim->add_option("--out", out_dir, "Output directory")->required();
    sim->add_flag("--plot", plot, "Also write nmse.svg and ber.svg");
    sim->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);

    CfrArgs ca;
    auto* cfr = app.add_subcommand("cfr", "Write the DAFT-domain CFR magnitude of a random channel");
    cfr->add_option("--waveform", ca.waveform)->check(CLI::IsMember({"ofdm", "ocdm", "afdm"}));
    cfr->add_option("--mode", ca.mode)->check(CLI::IsMember({"msml", "dfs-only"}));
    cfr->add_option("--out", ca.out, "Output directory")->required();
    cfr->add_option("--seed", ca.seed);
    cfr->add_option("--paths", ca.paths);
    cfr->add_option("--doppler-order", ca.doppler_order);
    cfr->add_option("--n", ca.n);
    cfr->add_option("--n-cpp", ca.n_cpp);
    cfr->add_option("--l-max", ca.l_max);
    cfr->add_option("--q-max", ca.q_max);
    cfr->add_flag("--per-path", ca.per_path, "Also write one CFR per unit-gain path");

    auto* met = app.add_subcommand("metrics", "Compute COP, MIP, diversity or PEP tables");
    std::string which;
    met->add_option("metric", which, "cop | mip | diversity | pep")
        ->required()
        ->check(CLI::IsMember({"cop", "mip", "diversity", "pep"}));
    met->add_option("--config", config_path, "JSON configuration")->required();
    met->add_option("--out", out_file, "Write the table to a file instead of stdout");

    auto* dict = app.add_subcommand("dict", "Build or inspect an OMP dictionary");
    dict->require_subcommand(1);
    auto* build = dict->add_subcommand("build", "Build and export a dictionary");
    build->add_option("--config", config_path, "JSON configuration")->required();
    build->add_option("--out", out_dir, "Output directory")->required();
    build->add_option("--waveform", dict_waveform)->check(CLI::IsMember({"ofdm", "ocdm", "afdm"}));
    build->add_option("--n-p", dict_np, "Pilot count (default: first pilot.n_p entry)");
    auto* inspect = dict->add_subcommand("inspect", "Report size, grid and MIP of an exported dictionary");
    inspect->add_option("--in", in_dir, "Dictionary directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return config_error;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, out_dir, plot, workers, out);
        if (cfr->parsed()) return cmd_cfr(ca, out);
        if (met->parsed()) return cmd_metrics(which, config_path, out_file, out);
        if (build->parsed()) return cmd_dict_build(config_path, out_dir, dict_waveform, dict_np, out);
        if (inspect->parsed()) return cmd_dict_inspect(in_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << "\n";
        return io_error;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return runtime_error;
    }
    return config_error;
}

}  // namespace afdm::cli
