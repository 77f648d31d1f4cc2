#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lotama/alloc_param.hpp"
#include "lotama/matrix.hpp"
#include "lotama/mechanism.hpp"

namespace lotama {

// Sharpness is an inverse-temperature multiplier applied inside the softmax;
// larger values recover the hard argmax.
struct SoftConfig {
    double sharpness = 100.0;
};

// Learned state of a lottery AMA during training: allocation logits (or a
// fixed menu when only boosts are trained), boosts per learnable slot, and
// raw bidder-weight parameters. The null outcome at menu index 0 is
// structural and carries no parameters.
//
// Weights materialize as softplus(raw) + 1e-6 to stay strictly positive;
// they are frozen at 1 for symmetric settings.
struct AmaParameters {
    FeasibilityClass feasibility = FeasibilityClass::Additive;
    int num_bidders = 0;
    int num_items = 0;

    bool lottery = true;                     // false: fixed_menu is trained boost-only
    AllocationLogits logits;                 // used when lottery
    std::vector<AllocationMatrix> fixed_menu;  // learnable slots only, no null

    std::vector<double> boosts;      // per learnable slot; null boost fixed 0
    std::vector<double> weight_raw;  // size num_bidders
    bool freeze_weights = true;

    static AmaParameters random_init(FeasibilityClass cls, int num_bidders, int num_items,
                                     int slots, std::uint64_t seed, bool freeze_weights = true);
    static AmaParameters fixed_menu_init(FeasibilityClass cls,
                                         std::vector<AllocationMatrix> menu_with_null,
                                         int num_bidders, int num_items,
                                         bool freeze_weights = true);

    int slots() const { return lottery ? logits.slots : static_cast<int>(fixed_menu.size()); }
    std::vector<double> weights() const;

    // Menu including the null outcome at index 0.
    std::vector<AllocationMatrix> materialize() const;
    AmaMechanism to_mechanism() const;

    // Flat parameter vector in a fixed order: logits (slot-major, row-major;
    // unit-demand interleaves row then col per slot), then boosts, then raw
    // weights when not frozen.
    std::size_t flat_size() const;
    std::vector<double> to_flat() const;
    void from_flat(std::span<const double> flat);
};

// Gradients of mean soft revenue, shaped like the parameters.
struct GradientBundle {
    std::vector<Matrix> d_additive;
    std::vector<Matrix> d_row_logits;
    std::vector<Matrix> d_col_logits;
    std::vector<double> d_boosts;
    std::vector<double> d_weight_raw;

    static GradientBundle zeros_like(const AmaParameters& params);
    std::vector<double> to_flat(const AmaParameters& params) const;
};

// softmax(sharpness * scores), numerically stabilized by max-subtraction.
std::vector<double> soft_choice(std::span<const double> scores, const SoftConfig& cfg);

// Mean over the batch of the soft total payment. Both terms of the payment
// rule are softened: the counterfactual term is the softmax-expectation of
// [others' weighted welfare + boost] under scores excluding the bidder, the
// realized term the same quantity under the full scores.
double soft_revenue(const AmaParameters& params, const std::vector<BidProfile>& batch,
                    const SoftConfig& cfg);

// Exact gradient of soft_revenue, reverse-accumulated through the fixed
// computation shape (welfare -> scores -> softmax -> payment -> materializer).
// Deterministic for fixed inputs regardless of thread count. If revenue_out
// is non-null it receives the forward value.
GradientBundle soft_revenue_gradient(const AmaParameters& params,
                                     const std::vector<BidProfile>& batch, const SoftConfig& cfg,
                                     double* revenue_out = nullptr);

// Exact (hard-argmax) total payment for one profile; shared by evaluation
// paths that do not need full outcomes.
double exact_total_payment(const AmaMechanism& mech, const BidProfile& bids);

}  // namespace lotama
