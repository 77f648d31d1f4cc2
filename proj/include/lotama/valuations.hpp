#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lotama/matrix.hpp"

namespace lotama {

enum class Family { UniformAdditive, Spherical, DiscretePoints };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

// A discrete support: points with probabilities summing to 1.
struct DiscreteSupport {
    std::vector<std::vector<double>> points;
    std::vector<double> probs;
};

// Valuation distribution over m x n bid profiles; per-bidder rows are i.i.d.
// for all built-in families.
struct DistributionSpec {
    Family family = Family::UniformAdditive;
    int num_bidders = 0;
    int num_items = 0;
    std::uint64_t seed = 0;

    // uniform-additive
    double lo = 0.0;
    double hi = 1.0;

    // spherical
    int points = 5;
    double scale = 2.0;
    std::uint64_t support_seed = 0;

    // discrete-points (also caches the generated spherical support)
    DiscreteSupport discrete;

    void validate() const;
    // Largest per-item value the family can produce (misreport search box).
    double value_cap() const;
};

// P directions drawn uniformly on the nonnegative part of the unit sphere in
// R^n; point t is scaled by scale^t and the ladder is normalized so the
// largest point has norm exactly 1. Probabilities are proportional to
// scale^{-t}, normalized.
DiscreteSupport build_spherical_support(int num_items, int num_points, std::uint64_t seed,
                                        double scale = 2.0);

// Materializes family parameters (e.g. the spherical support) so repeated
// sampling does not rebuild them.
DistributionSpec prepare(const DistributionSpec& spec);

// i.i.d. batch of bid profiles; the stream tag makes every consumer (training
// step, evaluation, regret search) reproducible and disjoint.
std::vector<BidProfile> sample_batch(const DistributionSpec& spec, long count,
                                     std::uint64_t stream);

// CSV support file with header v_1,...,v_n,prob; rejects negative values and
// probabilities not summing to 1 within 1e-9.
DiscreteSupport load_discrete_csv(const std::string& path, int num_items);

}  // namespace lotama
