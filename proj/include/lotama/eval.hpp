#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lotama/mechanism.hpp"
#include "lotama/optimizer.hpp"
#include "lotama/valuations.hpp"

namespace lotama {

struct RevenueEstimate {
    double mean = 0.0;
    double se = 0.0;
    long samples = 0;
};

// Exact-mode auction on each sampled profile: mean total payment with its
// standard error.
RevenueEstimate evaluate_revenue(const AmaMechanism& mech, const DistributionSpec& spec,
                                 long samples = 100000, std::uint64_t seed = 0);

struct RegretReport {
    std::vector<double> max_regret;                    // per bidder, clamped at 0
    std::vector<std::vector<double>> best_misreport;   // per bidder
    long budget_used = 0;
    double overall_max = 0.0;
};

// Heuristic misreport search (not a certificate): uniform draws over the
// valuation box, coordinate-wise perturbations of truth, all-zero, and truth
// scaled by 1/2 and 2.
RegretReport estimate_regret(const AmaMechanism& mech, const DistributionSpec& spec,
                             int profiles = 200, int misreports_per = 64, std::uint64_t seed = 0);

// Same search against an arbitrary auction rule (used to demonstrate that a
// non-strategyproof payment rule is caught).
using AuctionRule = std::function<AuctionOutcome(const BidProfile&)>;
RegretReport estimate_regret_rule(const AuctionRule& rule, int num_bidders, int num_items,
                                  const DistributionSpec& spec, int profiles = 200,
                                  int misreports_per = 64, std::uint64_t seed = 0);

struct UsageReport {
    std::vector<int> used_indices;       // sorted, distinct argmax winners
    int used_count = 0;
    int count_at_initialization = 0;     // menu size of the evaluated mechanism
    std::int64_t deterministic_count = 0;  // closed-form count for the setting
};

UsageReport allocation_usage(const AmaMechanism& mech, const DistributionSpec& spec,
                             long samples = 100000, std::uint64_t seed = 0);

// |A intersect B| / |A union B| over used-index sets; two empty sets are
// identical, hence 1.
double jaccard_usage_similarity(const std::vector<int>& a, const std::vector<int>& b);

struct TicketArm {
    std::vector<double> revenues;  // one per data seed
    double mean = 0.0;
    double best = 0.0;
};

struct TicketReport {
    std::vector<int> donor_used_indices;
    int ticket_slots = 0;
    TicketArm winning_ticket;
    TicketArm random_small;
};

// Lottery-ticket comparison: extract the initial parameter values of the
// donor run's finally-used slots, retrain that small model on fresh data
// seeds, and race it against equally small fresh random initializations.
TicketReport lottery_ticket_experiment(const TrainResult& donor, const TrainConfig& small_cfg,
                                       const DistributionSpec& distribution, int data_seeds = 4,
                                       long usage_samples = 100000, long eval_samples = 100000);

// Result persistence: one CSV row per (experiment, seed). Column order is
// fixed: experiment_id,setting,mechanism_kind,K,steps,batch,revenue_mean,
// revenue_se,max_regret,used_allocations,wall_clock_s,seed,mechanism_path.
struct ResultRow {
    std::string experiment_id;
    std::string setting;
    std::string mechanism_kind;
    int menu_slots = 0;
    int steps = 0;
    int batch = 0;
    double revenue_mean = 0.0;
    double revenue_se = 0.0;
    double max_regret = 0.0;
    int used_allocations = 0;
    double wall_clock_s = 0.0;
    std::uint64_t seed = 0;
    std::string mechanism_path;
};

extern const char* kResultCsvHeader;
void append_result_csv(const std::string& path, const ResultRow& row);

}  // namespace lotama
