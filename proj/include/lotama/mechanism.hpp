#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lotama/matrix.hpp"

namespace lotama {

enum class FeasibilityClass { Additive, UnitDemand };

std::string to_string(FeasibilityClass cls);
FeasibilityClass feasibility_from_string(const std::string& name);

// Absolute tolerance on allocation row/column sums; normalized
// parameterizations accumulate float error up to this order.
constexpr double kFeasibilityTol = 1e-9;

// A payment below this bound indicates an implementation bug, not float noise.
constexpr double kPaymentBugTol = -1e-6;

bool allocation_is_feasible(const AllocationMatrix& a, FeasibilityClass cls,
                            double tol = kFeasibilityTol);

// Exact affine maximizer auction. The menu is a finite list of allocations
// with per-allocation boosts; index 0 is always the fixed null outcome
// (all-zero allocation, boost 0), which guarantees individual rationality
// regardless of the learned parameters.
struct AmaMechanism {
    int num_bidders = 0;
    int num_items = 0;
    FeasibilityClass feasibility = FeasibilityClass::Additive;
    std::vector<AllocationMatrix> allocations;  // size K, allocations[0] = null
    std::vector<double> boosts;                 // size K, boosts[0] = 0
    std::vector<double> weights;                // size num_bidders, all > 0

    int menu_size() const { return static_cast<int>(allocations.size()); }

    // Throws InvariantViolation / ConfigError when the menu breaks its
    // structural invariants (null slot, positive weights, feasibility).
    void validate() const;
};

struct AuctionOutcome {
    int winner_index = 0;
    AllocationMatrix allocation;
    std::vector<double> payments;   // raw, possibly in [-1e-9, 0)
    std::vector<double> utilities;  // u_i = sum_j a_ij v_ij - p_i
};

// s_k = sum_{i not excluded} w_i * sum_j (a_k)_ij v_ij + b_k for every menu
// slot k. Excluding a bidder zeroes their welfare contribution only; menu and
// boosts are untouched.
std::vector<double> score_allocations(const AmaMechanism& mech, const BidProfile& bids,
                                      std::optional<int> exclude = std::nullopt);

// Winner determination (argmax of scores, ties to the lowest index) plus the
// counterfactual payments: p_i = (1/w_i) * [max_k s^{-i}_k - (s_{k*} - w_i V_{i,k*})].
AuctionOutcome run_auction(const AmaMechanism& mech, const BidProfile& bids);

// Runs the exact auction on (report, others) and evaluates bidder i's utility
// at their true values.
double utility_of_report(const AmaMechanism& mech, const std::vector<double>& true_values,
                         const std::vector<double>& report, int bidder, const BidProfile& others);

// Indirect (truthful) utility of bidder i with own value row `own`, opponents
// fixed. This is the function that is convex in `own`.
double truthful_utility(const AmaMechanism& mech, const std::vector<double>& own, int bidder,
                        const BidProfile& others);

constexpr std::int64_t kEnumerationGuard = 1'000'000;

// All 0/1 allocations of the feasibility class, null first, deterministic
// order (items enumerate their disposition in base m+1, item 0 least
// significant). Refuses when (m+1)^n exceeds the guard.
std::vector<AllocationMatrix> enumerate_deterministic_allocations(
    int num_bidders, int num_items, FeasibilityClass cls,
    std::int64_t guard = kEnumerationGuard);

// Closed-form count of deterministic feasible allocations (no enumeration);
// saturates at INT64_MAX.
std::int64_t count_deterministic_allocations(int num_bidders, int num_items,
                                             FeasibilityClass cls);

// Mechanism JSON (External Interfaces): {format_version, m, n,
// feasibility_class, weights, boosts, allocations}. Round-trips are
// value-exact at 64-bit float precision.
std::string mechanism_to_json(const AmaMechanism& mech);
AmaMechanism mechanism_from_json(const std::string& text);
void save_mechanism(const AmaMechanism& mech, const std::string& path);
AmaMechanism load_mechanism(const std::string& path);

}  // namespace lotama
