#include "lotama/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lotama/errors.hpp"
#include "lotama/parallel.hpp"
#include "lotama/rng.hpp"

namespace lotama {

void TrainConfig::validate() const {
    if (steps < 0) throw ConfigError("steps must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
    if (!(sharpness > 0.0)) throw ConfigError("sharpness must be positive");
    if (menu_size < 1) throw ConfigError("menu_size must be >= 1");
    if (eval_every < 1) throw ConfigError("eval_every must be >= 1");
    if (eval_samples < 1) throw ConfigError("eval_samples must be >= 1");
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               const TrainConfig& cfg) {
    if (params.size() != grads.size()) throw ConfigError("adam: parameter/gradient size mismatch");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.step = 0;
    }
    if (state.m.size() != params.size())
        throw ConfigError("adam: state size does not match parameters");
    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        // descent on -revenue == ascent on revenue
        const double g = -grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        const double update = cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.eps);
        if (!std::isfinite(update))
            throw NumericalError("non-finite Adam update at step " + std::to_string(state.step) +
                                 ", parameter " + std::to_string(i));
        params[i] -= update;
    }
}

namespace {

double exact_mean_revenue(const AmaMechanism& mech, const DistributionSpec& dist, long samples,
                          std::uint64_t stream) {
    auto batch = sample_batch(dist, samples, stream);
    const int chunks = static_cast<int>(std::min<long>(32, samples));
    std::vector<double> partial(chunks, 0.0);
    parallel_chunks(chunks, [&](int c) {
        double acc = 0.0;
        const long lo = chunk_begin(samples, chunks, c);
        const long hi = chunk_begin(samples, chunks, c + 1);
        for (long p = lo; p < hi; ++p) acc += exact_total_payment(mech, batch[p]);
        partial[c] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(samples);
}

TrainResult run_loop(const TrainConfig& cfg, AmaParameters params, const DistributionSpec& raw) {
    cfg.validate();
    const DistributionSpec dist = prepare(raw);
    if (dist.num_bidders != params.num_bidders || dist.num_items != params.num_items)
        throw ConfigError("distribution dimensions do not match parameters");

    TrainResult result;
    result.initial_params = params;
    SoftConfig soft{cfg.sharpness};
    AdamState state;
    std::vector<double> flat = params.to_flat();
    const auto start = std::chrono::steady_clock::now();

    for (int step = 0; step < cfg.steps; ++step) {
        auto batch = sample_batch(dist, cfg.batch_size,
                                  derive_seed(stream::kTrainBatch, static_cast<std::uint64_t>(step)));
        double revenue = 0.0;
        GradientBundle grads;
        try {
            grads = soft_revenue_gradient(params, batch, soft, &revenue);
        } catch (const NumericalError& e) {
            throw NumericalError(std::string(e.what()) + " (training step " +
                                 std::to_string(step) + ")");
        }
        if (!std::isfinite(revenue))
            throw NumericalError("training diverged: non-finite soft revenue at step " +
                                 std::to_string(step));
        result.trace.soft_revenue.push_back(revenue);
        adam_step(flat, grads.to_flat(params), state, cfg);
        params.from_flat(flat);
        if ((step + 1) % cfg.eval_every == 0 || step + 1 == cfg.steps) {
            const double exact = exact_mean_revenue(params.to_mechanism(), dist, cfg.eval_samples,
                                                    derive_seed(stream::kEval, 0));
            result.trace.exact_revenue.emplace_back(step + 1, exact);
        }
    }

    result.final_params = std::move(params);
    result.mechanism = result.final_params.to_mechanism();
    result.trace.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace

TrainResult train(const TrainConfig& cfg, FeasibilityClass feasibility,
                  const DistributionSpec& distribution) {
    AmaParameters params = AmaParameters::random_init(
        feasibility, distribution.num_bidders, distribution.num_items, cfg.menu_size, cfg.seed,
        cfg.freeze_weights);
    return run_loop(cfg, std::move(params), distribution);
}

TrainResult train_from(const TrainConfig& cfg, const AmaParameters& initial,
                       const DistributionSpec& distribution) {
    return run_loop(cfg, initial, distribution);
}

namespace {

nlohmann::json matrices_to_json(const std::vector<Matrix>& mats) {
    auto arr = nlohmann::json::array();
    for (const auto& mat : mats) {
        nlohmann::json jm;
        jm["rows"] = mat.rows;
        jm["cols"] = mat.cols;
        jm["data"] = mat.data;
        arr.push_back(std::move(jm));
    }
    return arr;
}

std::vector<Matrix> matrices_from_json(const nlohmann::json& arr) {
    std::vector<Matrix> mats;
    for (const auto& jm : arr) {
        Matrix mat(jm.at("rows").get<int>(), jm.at("cols").get<int>());
        mat.data = jm.at("data").get<std::vector<double>>();
        if (mat.data.size() != static_cast<std::size_t>(mat.rows) * mat.cols)
            throw ConfigError("parameter matrix data length mismatch");
        mats.push_back(std::move(mat));
    }
    return mats;
}

}  // namespace

std::string params_to_json(const AmaParameters& params) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["m"] = params.num_bidders;
    j["n"] = params.num_items;
    j["feasibility_class"] = to_string(params.feasibility);
    j["lottery"] = params.lottery;
    j["freeze_weights"] = params.freeze_weights;
    j["boosts"] = params.boosts;
    j["weight_raw"] = params.weight_raw;
    if (params.lottery) {
        if (params.feasibility == FeasibilityClass::Additive)
            j["additive_logits"] = matrices_to_json(params.logits.additive);
        else {
            j["row_logits"] = matrices_to_json(params.logits.row_logits);
            j["col_logits"] = matrices_to_json(params.logits.col_logits);
        }
    } else {
        j["fixed_menu"] = matrices_to_json(params.fixed_menu);
    }
    return j.dump();
}

AmaParameters params_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid parameter JSON: ") + e.what());
    }
    AmaParameters p;
    try {
        p.num_bidders = j.at("m").get<int>();
        p.num_items = j.at("n").get<int>();
        p.feasibility = feasibility_from_string(j.at("feasibility_class").get<std::string>());
        p.lottery = j.at("lottery").get<bool>();
        p.freeze_weights = j.at("freeze_weights").get<bool>();
        p.boosts = j.at("boosts").get<std::vector<double>>();
        p.weight_raw = j.at("weight_raw").get<std::vector<double>>();
        if (p.lottery) {
            p.logits.feasibility = p.feasibility;
            p.logits.num_bidders = p.num_bidders;
            p.logits.num_items = p.num_items;
            if (p.feasibility == FeasibilityClass::Additive) {
                p.logits.additive = matrices_from_json(j.at("additive_logits"));
                p.logits.slots = static_cast<int>(p.logits.additive.size());
            } else {
                p.logits.row_logits = matrices_from_json(j.at("row_logits"));
                p.logits.col_logits = matrices_from_json(j.at("col_logits"));
                p.logits.slots = static_cast<int>(p.logits.row_logits.size());
            }
        } else {
            p.fixed_menu = matrices_from_json(j.at("fixed_menu"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid parameter JSON: ") + e.what());
    }
    return p;
}

void save_checkpoint(const std::string& directory, const AmaParameters& params,
                     const AdamState& state) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    save_mechanism(params.to_mechanism(), (fs::path(directory) / "mechanism.json").string());
    nlohmann::json sidecar;
    sidecar["params"] = nlohmann::json::parse(params_to_json(params));
    sidecar["adam_m"] = state.m;
    sidecar["adam_v"] = state.v;
    sidecar["step"] = state.step;
    std::ofstream out(fs::path(directory) / "optimizer_state.json");
    if (!out) throw ConfigError("cannot write checkpoint sidecar in " + directory);
    out << sidecar.dump() << '\n';
}

std::pair<AmaParameters, AdamState> load_checkpoint(const std::string& directory) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(directory) / "optimizer_state.json");
    if (!in) throw ConfigError("missing optimizer_state.json in " + directory);
    std::stringstream buf;
    buf << in.rdbuf();
    nlohmann::json sidecar;
    try {
        sidecar = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid checkpoint sidecar: ") + e.what());
    }
    AmaParameters params = params_from_json(sidecar.at("params").dump());
    AdamState state;
    state.m = sidecar.at("adam_m").get<std::vector<double>>();
    state.v = sidecar.at("adam_v").get<std::vector<double>>();
    state.step = sidecar.at("step").get<long>();
    return {std::move(params), std::move(state)};
}

}  // namespace lotama
