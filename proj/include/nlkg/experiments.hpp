#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlkg/evolution.hpp"

namespace nlkg {

/// Fully determines a run; every field has a CLI override.
struct ExperimentConfig {
    std::string experiment;
    int d = 3;
    double p = 2.0;
    double gamma = 1.0;
    double omega = 0.5;
    double r_max = 60.0;
    int n = 4096;
    double cfl = 0.4;
    double t_end = 50.0;
    double blowup_h1_factor = 1e3;
    double blowup_amp = 1e6;
    double sample_spacing = 0.01;
    std::vector<double> lambdas{1.02, 1.05, 1.1};
    std::vector<double> deltas{1e-2};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<double> omegas{0.0, 0.2, 0.5, 0.8};
    std::vector<double> radii{};  ///< weight radii; defaults to r_max-scaled pair
    double stability_eps = 5e-2;
    std::string method = "shoot";      ///< ground-state experiment: shoot | minimize
    std::string index = "0m1";         ///< minimize index: d2 | 2pm1 | 0m1
    std::string out_dir;
    std::uint64_t rng_seed = 1;
    int fuzz_fields = 100;

    static ExperimentConfig from_json_file(const std::string& path);
    std::string to_json() const;
};

struct CheckLine {
    std::string name;
    std::string status;  ///< pass | fail | info
    double value = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct ExperimentReport {
    std::string experiment;
    std::string statement;  ///< which qualitative result this run exercises
    std::vector<CheckLine> checks;
    bool passed() const {
        for (const auto& c : checks)
            if (c.status == "fail") return false;
        return true;
    }
    void write_json(const std::string& path) const;
    void print(std::ostream& os) const;
};

ExperimentReport run_ground_state(const ExperimentConfig& cfg);
ExperimentReport run_evolve(const ExperimentConfig& cfg);
ExperimentReport run_stability(const ExperimentConfig& cfg);
ExperimentReport run_instability(const ExperimentConfig& cfg);
ExperimentReport run_scaling_law(const ExperimentConfig& cfg);
ExperimentReport run_identities(const ExperimentConfig& cfg);
ExperimentReport run_inequalities(const ExperimentConfig& cfg);
ExperimentReport run_section4(const ExperimentConfig& cfg);

/// Dispatch by cfg.experiment; exit-code semantics: 0 pass, 1 check failure,
/// 2 configuration error, 3 numerical error.
int run_experiment_cli(const ExperimentConfig& cfg);

/// Map experiment to the runner, throwing parameter_error for unknown names.
ExperimentReport dispatch_experiment(const ExperimentConfig& cfg);

}  // namespace nlkg
