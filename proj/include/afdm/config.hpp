// config.hpp - JSON run configuration
//
// {
//   "waveform":  {"kinds": ["afdm","ocdm","ofdm"], "n": 128, "n_cpp": 32,
//                 "f_s": 1500, "f_c": 35000, "c2": 0},
//   "channel":   {"paths": 5, "l_max": 19, "q_max": 1, "doppler_order": 1e-4,
//                 "decay_alpha": null, "mode": "msml", "distinct_delays": true},
//   "pilot":     {"placement": "contiguous", "n_p": [64, 128]},
//   "estimator": {"kinds": ["omp","ideal"], "imi_levels": 3,
//                 "omp_stop": "known-p", "residual_tol": 1.2,
//                 "imi_stop": "known-p"},
//   "metrics":   {"draws": 500, "error_samples": 16, "max_error_weight": 4,
//                 "inv_n0": 50, "epsilon": 0.1, "relative_rank": false,
//                 "cop_trials": 100000},
//   "snr_db": [0, 10, 20, 30], "trials": 1000, "seed": 1, "workers": 1
// }
//
// Every section and key is optional except "seed". Unknown keys are errors.
// residual_tol applies to omp_stop = "residual": OMP stops once the residual
// norm drops to residual_tol * sigma * sqrt(n), i.e. to the noise level.

#pragma once

#include "afdm/link_sim.hpp"
#include "afdm/metrics.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace afdm {

inline constexpr const char* kVersion = "0.1.0";

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    ExperimentConfig experiment;
    DiversityOptions diversity;
    std::int64_t cop_trials = 100000;
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Canonical JSON of the effective configuration (defaults filled in).
std::string config_to_json(const RunConfig& config);

}  // namespace afdm
