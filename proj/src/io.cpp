#include "lotama/io.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "lotama/errors.hpp"

namespace lotama {

std::map<std::string, std::string> parse_flat_config(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    auto trim = [](std::string s) {
        const char* ws = " \t\r";
        const auto a = s.find_first_not_of(ws);
        if (a == std::string::npos) return std::string();
        const auto b = s.find_last_not_of(ws);
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (kv.count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        kv[key] = value;
    }
    return kv;
}

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "experiment_id", "profile", "feasibility",
        // distribution
        "family", "m", "n", "lo", "hi", "points", "scale", "support_seed", "support_csv",
        // training
        "steps", "batch_size", "learning_rate", "beta1", "beta2", "eps", "sharpness", "menu_size",
        "seed", "freeze_weights", "eval_every", "eval_samples",
        // evaluation and audits
        "samples", "regret_profiles", "regret_misreports",
        // subcommand inputs
        "mechanism", "baseline", "donor_dir", "data_seeds"};
    return keys;
}

class KvReader {
  public:
    KvReader(const std::map<std::string, std::string>& kv, std::string origin)
        : kv_(kv), origin_(std::move(origin)) {}

    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) const {
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : it->second;
    }
    long integer(const std::string& key, long fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            std::size_t used = 0;
            const long v = std::stol(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw ConfigError(origin_ + ": key '" + key + "' expects an integer, got '" +
                              it->second + "'");
        }
    }
    double real(const std::string& key, double fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw ConfigError(origin_ + ": key '" + key + "' expects a number, got '" +
                              it->second + "'");
        }
    }
    bool boolean(const std::string& key, bool fallback) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::string v = it->second;
        std::transform(v.begin(), v.end(), v.begin(), ::tolower);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(origin_ + ": key '" + key + "' expects a boolean, got '" + it->second +
                          "'");
    }

  private:
    const std::map<std::string, std::string>& kv_;
    std::string origin_;
};

}  // namespace

ExperimentConfig experiment_config_from_map(const std::map<std::string, std::string>& kv,
                                            const std::string& origin) {
    for (const auto& [key, value] : kv) {
        (void)value;
        if (!known_keys().count(key))
            throw ConfigError(origin + ": unknown config key '" + key + "'");
    }
    KvReader r(kv, origin);
    ExperimentConfig cfg;
    cfg.experiment_id = r.str("experiment_id", "run");
    cfg.profile = r.str("profile", "desk");

    // profile defaults, overridable by explicit keys
    if (cfg.profile == "desk") {
        cfg.train.steps = 3000;
        cfg.train.batch_size = 4096;
        cfg.train.menu_size = 1024;
    } else if (cfg.profile == "paper") {
        cfg.train.steps = 9000;
        cfg.train.batch_size = 1 << 15;
        cfg.train.menu_size = 4096;
    } else {
        throw ConfigError(origin + ": profile must be 'desk' or 'paper', got '" + cfg.profile +
                          "'");
    }

    cfg.feasibility = feasibility_from_string(r.str("feasibility", "additive"));

    auto& d = cfg.distribution;
    d.family = family_from_string(r.str("family", "uniform-additive"));
    d.num_bidders = static_cast<int>(r.integer("m", 2));
    d.num_items = static_cast<int>(r.integer("n", 2));
    d.lo = r.real("lo", 0.0);
    d.hi = r.real("hi", 1.0);
    d.points = static_cast<int>(r.integer("points", 5));
    d.scale = r.real("scale", 2.0);
    d.support_seed = static_cast<std::uint64_t>(r.integer("support_seed", 0));
    cfg.support_csv = r.str("support_csv", "");
    if (!cfg.support_csv.empty()) {
        if (d.family != Family::DiscretePoints)
            throw ConfigError(origin + ": support_csv requires family = discrete-points");
        d.discrete = load_discrete_csv(cfg.support_csv, d.num_items);
    }

    auto& t = cfg.train;
    t.steps = static_cast<int>(r.integer("steps", t.steps));
    t.batch_size = static_cast<int>(r.integer("batch_size", t.batch_size));
    t.learning_rate = r.real("learning_rate", t.learning_rate);
    t.beta1 = r.real("beta1", t.beta1);
    t.beta2 = r.real("beta2", t.beta2);
    t.eps = r.real("eps", t.eps);
    t.sharpness = r.real("sharpness", t.sharpness);
    t.menu_size = static_cast<int>(r.integer("menu_size", t.menu_size));
    t.seed = static_cast<std::uint64_t>(r.integer("seed", 0));
    t.freeze_weights = r.boolean("freeze_weights", true);
    t.eval_every = static_cast<int>(r.integer("eval_every", 500));
    t.eval_samples = r.integer("eval_samples", 10000);
    d.seed = t.seed;

    cfg.samples = r.integer("samples", 100000);
    cfg.regret_profiles = static_cast<int>(r.integer("regret_profiles", 200));
    cfg.regret_misreports = static_cast<int>(r.integer("regret_misreports", 64));
    cfg.data_seeds = static_cast<int>(r.integer("data_seeds", 4));
    cfg.mechanism_path = r.str("mechanism", "");
    cfg.baseline_kind = r.str("baseline", "");
    cfg.donor_dir = r.str("donor_dir", "");

    cfg.train.validate();
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return experiment_config_from_map(parse_flat_config(buf.str()), path);
}

}  // namespace lotama
