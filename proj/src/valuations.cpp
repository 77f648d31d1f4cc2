#include "lotama/valuations.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "lotama/errors.hpp"
#include "lotama/rng.hpp"

namespace lotama {

std::string to_string(Family family) {
    switch (family) {
        case Family::UniformAdditive: return "uniform-additive";
        case Family::Spherical: return "spherical";
        case Family::DiscretePoints: return "discrete-points";
    }
    return "?";
}

Family family_from_string(const std::string& name) {
    if (name == "uniform-additive" || name == "uniform") return Family::UniformAdditive;
    if (name == "spherical") return Family::Spherical;
    if (name == "discrete-points" || name == "discrete") return Family::DiscretePoints;
    throw ConfigError("unknown valuation family: " + name);
}

void DistributionSpec::validate() const {
    if (num_bidders <= 0 || num_items <= 0)
        throw ConfigError("distribution requires positive bidder and item counts");
    switch (family) {
        case Family::UniformAdditive:
            if (!(lo >= 0.0) || !(hi > lo))
                throw ConfigError("uniform-additive requires 0 <= lo < hi");
            break;
        case Family::Spherical:
            if (points < 1) throw ConfigError("spherical point count must be >= 1");
            if (!(scale > 1.0)) throw ConfigError("spherical scale must exceed 1");
            break;
        case Family::DiscretePoints: {
            if (discrete.points.empty() || discrete.points.size() != discrete.probs.size())
                throw ConfigError("discrete-points requires matching points and probabilities");
            double total = 0.0;
            for (double p : discrete.probs) {
                if (p < 0.0) throw ConfigError("discrete probabilities must be nonnegative");
                total += p;
            }
            if (std::abs(total - 1.0) > 1e-12)
                throw ConfigError("discrete probabilities must sum to 1");
            for (const auto& pt : discrete.points) {
                if (static_cast<int>(pt.size()) != num_items)
                    throw ConfigError("discrete point dimension does not match item count");
                for (double v : pt)
                    if (v < 0.0 || !std::isfinite(v))
                        throw ConfigError("discrete point values must be finite and nonnegative");
            }
            break;
        }
    }
}

double DistributionSpec::value_cap() const {
    switch (family) {
        case Family::UniformAdditive: return hi;
        case Family::Spherical: return 1.0;  // largest point has norm 1
        case Family::DiscretePoints: {
            double cap = 0.0;
            for (const auto& pt : discrete.points)
                for (double v : pt) cap = std::max(cap, v);
            return cap;
        }
    }
    return 1.0;
}

DiscreteSupport build_spherical_support(int num_items, int num_points, std::uint64_t seed,
                                        double scale) {
    if (num_points < 2 || num_items < 1)
        throw ConfigError("spherical support requires P >= 2 and n >= 1");
    if (!(scale > 1.0)) throw ConfigError("spherical scale must exceed 1");
    Rng rng(derive_seed(seed, stream::kInit, 0x5f5eULL));
    std::normal_distribution<double> gauss(0.0, 1.0);
    DiscreteSupport support;
    support.points.resize(num_points);
    support.probs.resize(num_points);
    double prob_total = 0.0;
    for (int t = 0; t < num_points; ++t) {
        std::vector<double> dir(num_items);
        double norm = 0.0;
        do {
            norm = 0.0;
            for (double& x : dir) {
                x = std::abs(gauss(rng));
                norm += x * x;
            }
            norm = std::sqrt(norm);
        } while (norm < 1e-12);
        // ladder scale^t, largest point normalized to norm 1
        const double radius = std::pow(scale, t - (num_points - 1));
        for (double& x : dir) x = x / norm * radius;
        support.points[t] = std::move(dir);
        support.probs[t] = std::pow(scale, -t);
        prob_total += support.probs[t];
    }
    for (double& p : support.probs) p /= prob_total;
    return support;
}

DistributionSpec prepare(const DistributionSpec& spec) {
    DistributionSpec out = spec;
    if (out.family == Family::Spherical && out.discrete.points.empty()) {
        out.discrete = build_spherical_support(out.num_items, out.points, out.support_seed,
                                               out.scale);
    }
    out.validate();
    if (out.family == Family::Spherical) {
        // spherical is a discrete distribution once the support is built
        double total = 0.0;
        for (double p : out.discrete.probs) total += p;
        for (double& p : out.discrete.probs) p /= total;
    }
    return out;
}

std::vector<BidProfile> sample_batch(const DistributionSpec& raw, long count,
                                     std::uint64_t stream) {
    if (count < 1) throw ConfigError("sample count must be >= 1");
    const DistributionSpec spec = prepare(raw);
    Rng rng(derive_seed(spec.seed, stream));
    std::vector<BidProfile> batch;
    batch.reserve(static_cast<std::size_t>(count));

    if (spec.family == Family::UniformAdditive) {
        std::uniform_real_distribution<double> uni(spec.lo, spec.hi);
        for (long p = 0; p < count; ++p) {
            BidProfile v(spec.num_bidders, spec.num_items);
            for (double& x : v.data) x = uni(rng);
            batch.push_back(std::move(v));
        }
        return batch;
    }

    // discrete families: cumulative inverse sampling per bidder row
    const auto& support = spec.discrete;
    std::vector<double> cumulative(support.probs.size());
    double acc = 0.0;
    for (std::size_t t = 0; t < support.probs.size(); ++t) {
        acc += support.probs[t];
        cumulative[t] = acc;
    }
    cumulative.back() = 1.0;
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (long p = 0; p < count; ++p) {
        BidProfile v(spec.num_bidders, spec.num_items);
        for (int i = 0; i < spec.num_bidders; ++i) {
            const double u = uni(rng);
            const std::size_t t = static_cast<std::size_t>(
                std::lower_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
            const auto& pt = support.points[std::min(t, support.points.size() - 1)];
            for (int j = 0; j < spec.num_items; ++j) v(i, j) = pt[j];
        }
        batch.push_back(std::move(v));
    }
    return batch;
}

DiscreteSupport load_discrete_csv(const std::string& path, int num_items) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open support CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty support CSV: " + path);
    // header must be v_1,...,v_n,prob
    {
        std::ostringstream expect;
        for (int j = 1; j <= num_items; ++j) expect << "v_" << j << ",";
        expect << "prob";
        std::string got = line;
        if (!got.empty() && got.back() == '\r') got.pop_back();
        if (got != expect.str())
            throw ConfigError("support CSV header must be '" + expect.str() + "', got '" + got +
                              "'");
    }
    DiscreteSupport support;
    double total = 0.0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> fields;
        while (std::getline(ss, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (...) {
                throw ConfigError("support CSV line " + std::to_string(lineno) +
                                  ": bad number '" + cell + "'");
            }
        }
        if (static_cast<int>(fields.size()) != num_items + 1)
            throw ConfigError("support CSV line " + std::to_string(lineno) +
                              ": expected " + std::to_string(num_items + 1) + " fields");
        const double prob = fields.back();
        fields.pop_back();
        for (double v : fields)
            if (v < 0.0)
                throw ConfigError("support CSV line " + std::to_string(lineno) +
                                  ": negative value");
        if (prob < 0.0)
            throw ConfigError("support CSV line " + std::to_string(lineno) +
                              ": negative probability");
        support.points.push_back(std::move(fields));
        support.probs.push_back(prob);
        total += prob;
    }
    if (support.points.empty()) throw ConfigError("support CSV has no data rows: " + path);
    if (std::abs(total - 1.0) > 1e-9)
        throw ConfigError("support CSV probabilities sum to " + std::to_string(total) +
                          ", expected 1");
    // renormalize the residual 1e-9-scale error so downstream sums are exact
    for (double& p : support.probs) p /= total;
    return support;
}

}  // namespace lotama
