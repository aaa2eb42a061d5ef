#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "orlicz/errors.hpp"
#include "orlicz/quadrature.hpp"

namespace orlicz {

using ordered_json = nlohmann::ordered_json;

// Shared configuration for the five experiment runners. Fields that a given
// experiment does not use are ignored; validate() checks the ones it does.
struct ExperimentConfig {
    std::string experiment;               // marginal | conditional | volume |
                                          // thinshell | ldp_rate
    std::vector<std::string> potentials;  // one or two potential specs
    double r = 1.0;
    std::vector<double> eps_list;         // conditional enlargements
    std::vector<long> n_list;             // strictly increasing dimensions
    int k = 1;                            // marginal block size
    long sample_count = 100000;           // budget for exact samplers
    long kept = 10000;                    // kept MCMC states
    long burn_in = -1;                    // -1 means 2 * n sweeps
    long thin = 5;
    double p = 2.0;                       // thin-shell norm exponent
    std::vector<double> x_grid;           // thin-shell evaluation points
    int n_levels = 8;                     // splitting levels
    int chains = 4;                       // chains per splitting stage
    int bins = 50;                        // histogram bins for TV
    std::uint64_t seed = 0;
    int workers = 1;
    double quad_abs_tol = 1e-12;
    std::string out;                      // output path prefix; empty = stdout

    // Fills experiment-specific defaults for fields left empty, then checks
    // the invariants (positivity, strictly increasing n list, potential
    // count). Throws ConfigError.
    void resolve();

    QuadratureConfig quadrature() const;

    ordered_json to_json() const;
    static ExperimentConfig from_json(const ordered_json& j);
};

struct ExperimentReport {
    ordered_json config;
    ordered_json cases = ordered_json::array();
    ordered_json fits = ordered_json::object();
    bool pass = false;
    double wall_clock_seconds = 0.0;
    std::uint64_t seed = 0;

    ordered_json to_json() const;

    // Companion table, one row per sampled case:
    // n,eps,statistic,target,tolerance,pass
    std::string to_csv() const;
};

ExperimentReport run_marginal_experiment(const ExperimentConfig& cfg);
ExperimentReport run_conditional_experiment(const ExperimentConfig& cfg);
ExperimentReport run_volume_experiment(const ExperimentConfig& cfg);
ExperimentReport run_thinshell_experiment(const ExperimentConfig& cfg);
ExperimentReport run_ldp_rate_experiment(const ExperimentConfig& cfg);

// Dispatches on cfg.experiment (cfg must already be resolved).
ExperimentReport run_experiment(const ExperimentConfig& cfg);

}  // namespace orlicz
