#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lotama/soft_ama.hpp"
#include "lotama/valuations.hpp"

namespace lotama {

struct TrainConfig {
    int steps = 9000;
    int batch_size = 1 << 15;
    double learning_rate = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double sharpness = 100.0;  // softmax inverse-temperature multiplier
    int menu_size = 4096;      // learnable slots K
    std::uint64_t seed = 0;
    bool freeze_weights = true;
    int eval_every = 500;      // periodic exact evaluation, trace only
    long eval_samples = 10000;

    void validate() const;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
};

// Standard bias-corrected Adam step maximizing revenue (descent on -revenue).
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& cfg);

struct TrainTrace {
    std::vector<double> soft_revenue;                  // one entry per step
    std::vector<std::pair<int, double>> exact_revenue;  // (step, exact test revenue)
    double wall_clock_s = 0.0;
};

struct TrainResult {
    AmaMechanism mechanism;     // exact-mode handoff from the final parameters
    AmaParameters initial_params;
    AmaParameters final_params;
    TrainTrace trace;
};

// Training loop: sample a fresh batch, materialize the menu, take the soft
// revenue gradient, Adam-update; hands back the exact mechanism built from
// the final parameters.
TrainResult train(const TrainConfig& cfg, FeasibilityClass feasibility,
                  const DistributionSpec& distribution);

// Same loop from an explicit starting point (fixed menus, winning-ticket
// initializations). cfg.menu_size is ignored; the initial parameters fix it.
TrainResult train_from(const TrainConfig& cfg, const AmaParameters& initial,
                       const DistributionSpec& distribution);

// Checkpointing: the mechanism JSON plus an optimizer-state sidecar carrying
// the raw parameters, Adam moments, and step counter.
void save_checkpoint(const std::string& directory, const AmaParameters& params,
                     const AdamState& state);
std::pair<AmaParameters, AdamState> load_checkpoint(const std::string& directory);

// Serialized raw parameters (also used for the winning-ticket snapshots).
std::string params_to_json(const AmaParameters& params);
AmaParameters params_from_json(const std::string& text);

}  // namespace lotama
