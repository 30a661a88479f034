#include "afdm/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace afdm {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, value] : obj.items())
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
    if (!obj.contains(key)) return;
    try {
        out = obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class T, class Parse>
void read_list(const json& obj, const char* key, std::vector<T>& out, const std::string& where, Parse parse) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + ": expected a list");
    out.clear();
    for (const json& item : v) {
        try {
            out.push_back(parse(item));
        } catch (const json::exception& e) {
            throw ConfigError(where + "." + key + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + "." + key + ": " + e.what());
        }
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    check_keys(root, "config",
               {"waveform", "channel", "pilot", "estimator", "metrics", "snr_db", "trials", "seed", "workers"});
    if (!root.contains("seed")) throw ConfigError("config: missing required key 'seed'");

    RunConfig rc;
    ExperimentConfig& ex = rc.experiment;
    try {
        if (root.contains("waveform")) {
            const json& w = root["waveform"];
            check_keys(w, "waveform", {"kinds", "n", "n_cpp", "f_s", "f_c", "c2"});
            read_list(w, "kinds", ex.waveforms, "waveform",
                      [](const json& j) { return parse_waveform_kind(j.get<std::string>()); });
            read(w, "n", ex.base.n, "waveform");
            read(w, "n_cpp", ex.base.n_cpp, "waveform");
            read(w, "f_s", ex.base.f_s, "waveform");
            read(w, "f_c", ex.base.f_c, "waveform");
            read(w, "c2", ex.base.c2, "waveform");
        }
        if (root.contains("channel")) {
            const json& c = root["channel"];
            check_keys(c, "channel",
                       {"paths", "l_max", "q_max", "doppler_order", "decay_alpha", "mode", "distinct_delays"});
            read(c, "paths", ex.channel.p, "channel");
            read(c, "l_max", ex.channel.l_max, "channel");
            read(c, "q_max", ex.channel.q_max, "channel");
            read(c, "doppler_order", ex.channel.doppler_order, "channel");
            if (c.contains("decay_alpha") && !c["decay_alpha"].is_null()) {
                double a = 0.0;
                read(c, "decay_alpha", a, "channel");
                ex.channel.decay_alpha = a;
            }
            if (c.contains("mode")) {
                std::string m;
                read(c, "mode", m, "channel");
                ex.channel.mode = parse_channel_mode(m);
            }
            read(c, "distinct_delays", ex.channel.distinct_delays, "channel");
        }
        if (root.contains("pilot")) {
            const json& p = root["pilot"];
            check_keys(p, "pilot", {"placement", "n_p"});
            if (p.contains("placement")) {
                std::string s;
                read(p, "placement", s, "pilot");
                ex.placement = parse_pilot_placement(s);
            }
            read_list(p, "n_p", ex.n_p, "pilot", [](const json& j) { return j.get<int>(); });
        }
        if (root.contains("estimator")) {
            const json& e = root["estimator"];
            check_keys(e, "estimator", {"kinds", "imi_levels", "omp_stop", "residual_tol", "imi_stop"});
            read_list(e, "kinds", ex.estimators, "estimator",
                      [](const json& j) { return parse_estimator_kind(j.get<std::string>()); });
            read(e, "imi_levels", ex.imi_levels, "estimator");
            read(e, "residual_tol", ex.omp_residual_tol, "estimator");
            if (e.contains("omp_stop")) {
                std::string s;
                read(e, "omp_stop", s, "estimator");
                if (s == "known-p") ex.omp_known_p = ex.channel.p;
                else if (s == "residual") ex.omp_known_p = 0;
                else throw ConfigError("estimator.omp_stop: expected 'known-p' or 'residual'");
            } else {
                ex.omp_known_p = ex.channel.p;
            }
            if (e.contains("imi_stop")) {
                std::string s;
                read(e, "imi_stop", s, "estimator");
                if (s == "known-p") ex.imi_known_p = true;
                else if (s == "threshold") ex.imi_known_p = false;
                else throw ConfigError("estimator.imi_stop: expected 'known-p' or 'threshold'");
            }
        } else {
            ex.omp_known_p = ex.channel.p;
        }
        if (root.contains("metrics")) {
            const json& m = root["metrics"];
            check_keys(m, "metrics", {"draws", "error_samples", "max_error_weight", "inv_n0", "epsilon",
                                      "relative_rank", "cop_trials"});
            read(m, "draws", rc.diversity.draws, "metrics");
            read(m, "error_samples", rc.diversity.error_samples, "metrics");
            read(m, "max_error_weight", rc.diversity.max_error_weight, "metrics");
            read(m, "inv_n0", rc.diversity.inv_n0, "metrics");
            read(m, "epsilon", rc.diversity.threshold.epsilon, "metrics");
            read(m, "relative_rank", rc.diversity.threshold.relative, "metrics");
            read(m, "cop_trials", rc.cop_trials, "metrics");
        }
        read_list(root, "snr_db", ex.snr_db, "config", [](const json& j) { return j.get<double>(); });
        read(root, "trials", ex.trials, "config");
        read(root, "seed", ex.seed, "config");
        read(root, "workers", ex.workers, "config");
        rc.diversity.seed = ex.seed;
        ex.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (rc.cop_trials < 1) throw ConfigError("metrics.cop_trials must be >= 1");
    if (rc.diversity.draws < 1 || rc.diversity.error_samples < 1 || rc.diversity.max_error_weight < 1)
        throw ConfigError("metrics: draws, error_samples and max_error_weight must be >= 1");
    if (!(rc.diversity.inv_n0 > 0.0)) throw ConfigError("metrics.inv_n0 must be positive");
    return rc;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& rc) {
    const ExperimentConfig& ex = rc.experiment;
    nlohmann::ordered_json j;
    std::vector<std::string> kinds, ests;
    for (WaveformKind k : ex.waveforms) kinds.push_back(to_string(k));
    for (EstimatorKind e : ex.estimators) ests.push_back(to_string(e));
    j["waveform"] = {{"kinds", kinds}, {"n", ex.base.n},     {"n_cpp", ex.base.n_cpp},
                     {"f_s", ex.base.f_s}, {"f_c", ex.base.f_c}, {"c2", ex.base.c2}};
    j["channel"] = {{"paths", ex.channel.p},
                    {"l_max", ex.channel.l_max},
                    {"q_max", ex.channel.q_max},
                    {"doppler_order", ex.channel.doppler_order},
                    {"decay_alpha", ex.channel.effective_decay_alpha()},
                    {"mode", to_string(ex.channel.mode)},
                    {"distinct_delays", ex.channel.distinct_delays}};
    j["pilot"] = {{"placement", to_string(ex.placement)}, {"n_p", ex.n_p}};
    j["estimator"] = {{"kinds", ests},
                      {"imi_levels", ex.imi_levels},
                      {"omp_stop", ex.omp_known_p > 0 ? "known-p" : "residual"},
                      {"residual_tol", ex.omp_residual_tol},
                      {"imi_stop", ex.imi_known_p ? "known-p" : "threshold"}};
    j["metrics"] = {{"draws", rc.diversity.draws},
                    {"error_samples", rc.diversity.error_samples},
                    {"max_error_weight", rc.diversity.max_error_weight},
                    {"inv_n0", rc.diversity.inv_n0},
                    {"epsilon", rc.diversity.threshold.epsilon},
                    {"relative_rank", rc.diversity.threshold.relative},
                    {"cop_trials", rc.cop_trials}};
    j["snr_db"] = ex.snr_db;
    j["trials"] = ex.trials;
    j["seed"] = ex.seed;
    j["workers"] = ex.workers;
    return j.dump(2);
}

}  // namespace afdm
