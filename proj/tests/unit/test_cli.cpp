#include "afdm/cli.hpp"
#include "afdm/io.hpp"

#include "doctest.h"

#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "afdm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = afdm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("afdm_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string write_config(const fs::path& dir, const std::string& json) {
    const std::string path = (dir / "run.json").string();
    afdm::write_text_file(path, json);
    return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(row);
    }
    return rows;
}

const char* kSmallRun = R"({
  "waveform": {"kinds": ["afdm", "ofdm"], "n": 32, "n_cpp": 8},
  "channel": {"paths": 2, "l_max": 5, "q_max": 1, "doppler_order": 1e-3},
  "pilot": {"placement": "contiguous", "n_p": [32]},
  "estimator": {"kinds": ["omp", "ideal"]},
  "metrics": {"draws": 5, "error_samples": 2, "cop_trials": 2000},
  "snr_db": [10], "trials": 3, "seed": 5
})";

}  // namespace

TEST_CASE("cli: simulate writes CSVs, plots and a manifest, then refuses to overwrite") {
    const fs::path dir = scratch("simulate");
    const std::string cfg = write_config(dir, kSmallRun);
    const std::string out = (dir / "out").string();
    const Result r = run({"simulate", "--config", cfg, "--out", out, "--plot", "--workers", "2"});
    REQUIRE(r.code == 0);
    for (const char* f : {"nmse.csv", "ber.csv", "nmse.svg", "ber.svg", "manifest.json"})
        CHECK(fs::exists(fs::path(out) / f));
    const auto nmse = parse_csv(afdm::read_text_file((fs::path(out) / "nmse.csv").string()));
    CHECK(nmse[0] == std::vector<std::string>{"waveform", "estimator", "n_p", "snr_db", "trials", "failures",
                                              "nmse_mean", "nmse_stderr"});
    CHECK(nmse.size() == 5u);
    const auto ber = parse_csv(afdm::read_text_file((fs::path(out) / "ber.csv").string()));
    CHECK(ber[0] == std::vector<std::string>{"waveform", "estimator", "n_p", "snr_db", "trials", "failures",
                                             "bit_errors", "bits", "ber", "ber_stderr"});
    const std::string manifest = afdm::read_text_file((fs::path(out) / "manifest.json").string());
    CHECK(manifest.find("\"seed\": 5") != std::string::npos);
    CHECK(manifest.find("\"csv_schema_version\": 1") != std::string::npos);

    CHECK(run({"simulate", "--config", cfg, "--out", out}).code == 4);
    fs::remove_all(dir);
}

TEST_CASE("cli: configuration and usage errors exit with 2") {
    const fs::path dir = scratch("errors");
    CHECK(run({}).code == 2);
    CHECK(run({"simulate", "--out", (dir / "x").string()}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    const std::string missing_seed = write_config(dir, R"({"trials": 3})");
    CHECK(run({"simulate", "--config", missing_seed, "--out", (dir / "a").string()}).code == 2);
    const std::string unknown_key = write_config(dir, R"({"seed": 1, "colour": "red"})");
    CHECK(run({"simulate", "--config", unknown_key, "--out", (dir / "b").string()}).code == 2);
    const std::string bad_np = write_config(dir, R"({"seed": 1, "pilot": {"n_p": [500]}})");
    CHECK(run({"simulate", "--config", bad_np, "--out", (dir / "c").string()}).code == 2);
    const std::string bad_json = write_config(dir, "{\"seed\": ");
    CHECK(run({"metrics", "cop", "--config", bad_json}).code == 2);
    CHECK(run({"cfr", "--waveform", "afdm", "--mode", "msml", "--out", (dir / "d").string(), "--l-max", "40"}).code ==
          2);
    CHECK(run({"metrics", "cop", "--config", (dir / "absent.json").string()}).code != 0);
    fs::remove_all(dir);
}

TEST_CASE("cli: metrics cop for OFDM with no Doppler spread is one") {
    const fs::path dir = scratch("cop");
    const std::string cfg = write_config(dir, R"({"waveform": {"kinds": ["ofdm"]},
        "channel": {"q_max": 0, "paths": 5}, "metrics": {"cop_trials": 500}, "seed": 2})");
    const Result r = run({"metrics", "cop", "--config", cfg});
    REQUIRE(r.code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2u);
    CHECK(rows[0] == std::vector<std::string>{"waveform", "cop_enumerated", "cop_monte_carlo", "cop_stderr", "trials"});
    CHECK(rows[1][0] == "ofdm");
    CHECK(std::stod(rows[1][1]) == 1.0);
    CHECK(std::stod(rows[1][2]) == 1.0);
    fs::remove_all(dir);
}

TEST_CASE("cli: metrics tables") {
    const fs::path dir = scratch("metrics");
    const std::string cfg = write_config(dir, kSmallRun);
    const Result mip = run({"metrics", "mip", "--config", cfg});
    REQUIRE(mip.code == 0);
    const auto rows = parse_csv(mip.out);
    CHECK(rows[0] == std::vector<std::string>{"waveform", "n_p", "placement", "columns", "mip"});
    CHECK(rows.size() == 3u);
    CHECK(rows[1][3] == "18");
    const Result div = run({"metrics", "diversity", "--config", cfg, "--out", (dir / "div.csv").string()});
    REQUIRE(div.code == 0);
    CHECK(afdm::read_text_file((dir / "div.csv").string()).rfind("waveform,effective_rank,count,mean_effective_rank\n", 0) ==
          0);
    const Result pep = run({"metrics", "pep", "--config", cfg});
    REQUIRE(pep.code == 0);
    CHECK(parse_csv(pep.out).size() == 11u);
    CHECK(run({"metrics", "entropy", "--config", cfg}).code == 2);
    fs::remove_all(dir);
}

TEST_CASE("cli: cfr peak positions follow the support offset") {
    const fs::path dir = scratch("cfr");
    const std::string out = (dir / "cfr").string();
    const Result r = run({"cfr", "--waveform", "afdm", "--mode", "dfs-only", "--out", out, "--seed", "11", "--paths",
                          "1", "--per-path"});
    REQUIRE(r.code == 0);
    const auto paths = parse_csv(afdm::read_text_file((fs::path(out) / "paths.csv").string()));
    REQUIRE(paths.size() == 2u);
    CHECK(paths[0].back() == "support_offset");
    const int offset = std::stoi(paths[1].back());
    const auto cfr = parse_csv(afdm::read_text_file((fs::path(out) / "cfr.csv").string()));
    CHECK(cfr[0] == std::vector<std::string>{"row", "col", "magnitude"});
    CHECK(cfr.size() == 128u * 128u + 1u);
    std::map<int, std::pair<double, int>> best;
    for (std::size_t i = 1; i < cfr.size(); ++i) {
        const int row = std::stoi(cfr[i][0]), col = std::stoi(cfr[i][1]);
        const double mag = std::stod(cfr[i][2]);
        if (!best.count(col) || mag > best[col].first) best[col] = {mag, row};
    }
    for (const auto& [col, peak] : best) CHECK(peak.second == (col + offset) % 128);
    CHECK(fs::exists(fs::path(out) / "cfr_path0.csv"));
    CHECK(fs::exists(fs::path(out) / "manifest.json"));
    fs::remove_all(dir);
}

TEST_CASE("cli: dict build and inspect") {
    const fs::path dir = scratch("dict");
    const std::string cfg = write_config(dir, kSmallRun);
    const std::string out = (dir / "dict").string();
    const Result b = run({"dict", "build", "--config", cfg, "--out", out, "--waveform", "afdm", "--n-p", "16"});
    REQUIRE(b.code == 0);
    for (const char* f : {"dictionary.json", "grid.csv", "pilot.csv", "columns.csv", "manifest.json"})
        CHECK(fs::exists(fs::path(out) / f));
    const Result i = run({"dict", "inspect", "--in", out});
    REQUIRE(i.code == 0);
    CHECK(i.out.find("columns,18\n") != std::string::npos);
    CHECK(i.out.find("pilot,contiguous,16\n") != std::string::npos);
    CHECK(run({"dict", "inspect", "--in", (dir / "nothing").string()}).code != 0);
    CHECK(run({"dict", "build", "--config", cfg, "--out", out}).code == 4);
    fs::remove_all(dir);
}
