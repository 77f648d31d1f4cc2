#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "lotama/mechanism.hpp"
#include "lotama/optimizer.hpp"
#include "lotama/valuations.hpp"

namespace lotama {

// Flat key-value experiment configuration mirroring TrainConfig and
// DistributionSpec. The loader rejects unknown keys.
//
//   # lines starting with '#' are comments
//   key = value
//
// `profile` names the scale defaults (desk: steps 3000, batch 4096, menu
// 1024; paper: steps 9000, batch 32768, menu 4096); explicit keys override.
struct ExperimentConfig {
    std::string experiment_id = "run";
    std::string profile = "desk";
    FeasibilityClass feasibility = FeasibilityClass::Additive;
    DistributionSpec distribution;
    TrainConfig train;

    long samples = 100000;        // evaluation / usage sample count
    int regret_profiles = 200;
    int regret_misreports = 64;
    int data_seeds = 4;           // ticket experiment arms
    std::string mechanism_path;   // eval/regret/usage input
    std::string baseline_kind;    // myerson | grand-bundle | vcg | det-ama
    std::string donor_dir;        // ticket experiment donor run directory
    std::string support_csv;      // discrete-points support file
};

ExperimentConfig load_experiment_config(const std::string& path);

// Parsed key=value body (exposed for tests).
std::map<std::string, std::string> parse_flat_config(const std::string& text);
ExperimentConfig experiment_config_from_map(const std::map<std::string, std::string>& kv,
                                            const std::string& origin = "<config>");

}  // namespace lotama
