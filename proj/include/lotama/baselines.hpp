#pragma once

#include <cstdint>

#include "lotama/mechanism.hpp"
#include "lotama/optimizer.hpp"
#include "lotama/valuations.hpp"

namespace lotama {

struct MyersonResult {
    double reserve = 0.0;
    double revenue = 0.0;
};

// Optimal single-item auction for i.i.d. U[lo,hi] bidders: second price with
// reserve max(lo, hi/2). Expected revenue per item via closed form when
// lo = 0, high-resolution quadrature otherwise.
MyersonResult myerson_uniform_item(int bidders, double lo, double hi);

// Monte Carlo of the same second-price-with-reserve auction; the independent
// cross-check for the closed form.
double second_price_reserve_revenue_mc(int bidders, double lo, double hi, double reserve,
                                       long samples, std::uint64_t seed);

struct BundleResult {
    double reserve = 0.0;
    double revenue = 0.0;
    double se = 0.0;
};

// Grand bundle: reduce each bidder to their bundle value sum_j v_ij, then a
// second-price-with-reserve auction. The reserve maximizes empirical revenue
// on a training sample (dense grid plus local refinement; concavity is not
// assumed) and is scored on a held-out sample.
BundleResult grand_bundle_revenue(const DistributionSpec& spec, long train_samples = 100000,
                                  long test_samples = 100000, std::uint64_t seed = 0);

// Zero-boost, unit-weight AMA over the enumerated deterministic menu: VCG.
AmaMechanism vcg_mechanism(int num_bidders, int num_items, FeasibilityClass cls);

// Deterministic AMA: menu fixed to the enumerated feasible allocations,
// boosts (and optionally weights) trained with the same soft loop.
TrainResult train_deterministic_ama(const TrainConfig& cfg, FeasibilityClass feasibility,
                                    const DistributionSpec& distribution);

}  // namespace lotama
