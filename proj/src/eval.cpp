#include "lotama/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "lotama/errors.hpp"
#include "lotama/parallel.hpp"
#include "lotama/rng.hpp"
#include "lotama/soft_ama.hpp"

namespace lotama {

RevenueEstimate evaluate_revenue(const AmaMechanism& mech, const DistributionSpec& raw,
                                 long samples, std::uint64_t seed) {
    const DistributionSpec spec = prepare(raw);
    auto batch = sample_batch(spec, samples, derive_seed(stream::kEval, seed));
    const int chunks = static_cast<int>(std::min<long>(32, samples));
    std::vector<double> part_sum(chunks, 0.0), part_sq(chunks, 0.0);
    parallel_chunks(chunks, [&](int c) {
        double acc = 0.0, acc_sq = 0.0;
        const long lo = chunk_begin(samples, chunks, c);
        const long hi = chunk_begin(samples, chunks, c + 1);
        for (long p = lo; p < hi; ++p) {
            const double r = exact_total_payment(mech, batch[p]);
            acc += r;
            acc_sq += r * r;
        }
        part_sum[c] = acc;
        part_sq[c] = acc_sq;
    });
    double total = 0.0, total_sq = 0.0;
    for (int c = 0; c < chunks; ++c) {
        total += part_sum[c];
        total_sq += part_sq[c];
    }
    RevenueEstimate out;
    out.samples = samples;
    const double n = static_cast<double>(samples);
    out.mean = total / n;
    const double var = std::max(0.0, total_sq / n - out.mean * out.mean);
    out.se = std::sqrt(var / n);
    return out;
}

namespace {

// Candidate misreports for one bidder: deterministic probes first, uniform
// box draws for the rest of the budget.
std::vector<std::vector<double>> misreport_candidates(const std::vector<double>& truth,
                                                      double cap, int budget, Rng& rng) {
    const int n = static_cast<int>(truth.size());
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(budget));
    auto clamp_vec = [&](std::vector<double> v) {
        for (double& x : v) x = std::clamp(x, 0.0, cap);
        return v;
    };
    out.push_back(std::vector<double>(static_cast<std::size_t>(n), 0.0));  // all-zero
    {
        std::vector<double> half = truth, twice = truth;
        for (double& x : half) x *= 0.5;
        for (double& x : twice) x *= 2.0;
        if (static_cast<int>(out.size()) < budget) out.push_back(clamp_vec(half));
        if (static_cast<int>(out.size()) < budget) out.push_back(clamp_vec(twice));
    }
    for (double delta : {0.1, 0.5}) {
        for (int j = 0; j < n && static_cast<int>(out.size()) < budget; ++j) {
            std::vector<double> up = truth, down = truth;
            up[static_cast<std::size_t>(j)] += delta * cap;
            down[static_cast<std::size_t>(j)] -= delta * cap;
            out.push_back(clamp_vec(up));
            if (static_cast<int>(out.size()) < budget) out.push_back(clamp_vec(down));
        }
    }
    std::uniform_real_distribution<double> uni(0.0, cap);
    while (static_cast<int>(out.size()) < budget) {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (double& x : v) x = uni(rng);
        out.push_back(std::move(v));
    }
    out.resize(static_cast<std::size_t>(budget));
    return out;
}

RegretReport regret_search(const AuctionRule& rule, int num_bidders, int num_items,
                           const DistributionSpec& spec, int profiles, int misreports_per,
                           std::uint64_t seed) {
    if (profiles < 1 || misreports_per < 1) throw ConfigError("regret budget must be >= 1");
    RegretReport report;
    report.max_regret.assign(static_cast<std::size_t>(num_bidders), 0.0);
    report.best_misreport.assign(static_cast<std::size_t>(num_bidders), {});
    auto batch = sample_batch(spec, profiles, derive_seed(stream::kRegret, seed));
    Rng rng(derive_seed(spec.seed, stream::kRegret, seed));
    const double cap = spec.value_cap();

    auto utility_at = [&](const BidProfile& profile, int i, const std::vector<double>& truth) {
        AuctionOutcome out = rule(profile);
        double value = 0.0;
        for (int j = 0; j < num_items; ++j) value += out.allocation(i, j) * truth[static_cast<std::size_t>(j)];
        return value - out.payments[static_cast<std::size_t>(i)];
    };

    for (const auto& profile : batch) {
        for (int i = 0; i < num_bidders; ++i) {
            std::vector<double> truth(static_cast<std::size_t>(num_items));
            for (int j = 0; j < num_items; ++j) truth[static_cast<std::size_t>(j)] = profile(i, j);
            const double truthful = utility_at(profile, i, truth);
            auto candidates = misreport_candidates(truth, cap, misreports_per, rng);
            BidProfile deviated = profile;
            for (const auto& report_vec : candidates) {
                for (int j = 0; j < num_items; ++j) deviated(i, j) = report_vec[static_cast<std::size_t>(j)];
                const double u = utility_at(deviated, i, truth);
                ++report.budget_used;
                const double gain = u - truthful;
                if (gain > report.max_regret[static_cast<std::size_t>(i)]) {
                    report.max_regret[static_cast<std::size_t>(i)] = gain;
                    report.best_misreport[static_cast<std::size_t>(i)] = report_vec;
                }
            }
        }
    }
    for (double r : report.max_regret) report.overall_max = std::max(report.overall_max, r);
    return report;
}

}  // namespace

RegretReport estimate_regret(const AmaMechanism& mech, const DistributionSpec& raw, int profiles,
                             int misreports_per, std::uint64_t seed) {
    const DistributionSpec spec = prepare(raw);
    if (spec.num_bidders != mech.num_bidders || spec.num_items != mech.num_items)
        throw ConfigError("distribution dimensions do not match mechanism");
    AuctionRule rule = [&mech](const BidProfile& bids) { return run_auction(mech, bids); };
    return regret_search(rule, mech.num_bidders, mech.num_items, spec, profiles, misreports_per,
                         seed);
}

RegretReport estimate_regret_rule(const AuctionRule& rule, int num_bidders, int num_items,
                                  const DistributionSpec& raw, int profiles, int misreports_per,
                                  std::uint64_t seed) {
    const DistributionSpec spec = prepare(raw);
    return regret_search(rule, num_bidders, num_items, spec, profiles, misreports_per, seed);
}

UsageReport allocation_usage(const AmaMechanism& mech, const DistributionSpec& raw, long samples,
                             std::uint64_t seed) {
    const DistributionSpec spec = prepare(raw);
    auto batch = sample_batch(spec, samples, derive_seed(stream::kUsage, seed));
    const int K = mech.menu_size();
    const int chunks = static_cast<int>(std::min<long>(32, samples));
    std::vector<std::vector<char>> part_used(static_cast<std::size_t>(chunks));
    parallel_chunks(chunks, [&](int c) {
        part_used[static_cast<std::size_t>(c)].assign(static_cast<std::size_t>(K), 0);
        std::vector<double> scores;
        const long lo = chunk_begin(samples, chunks, c);
        const long hi = chunk_begin(samples, chunks, c + 1);
        for (long p = lo; p < hi; ++p) {
            scores = score_allocations(mech, batch[p]);
            int kstar = 0;
            for (int k = 1; k < K; ++k)
                if (scores[static_cast<std::size_t>(k)] > scores[static_cast<std::size_t>(kstar)])
                    kstar = k;
            part_used[static_cast<std::size_t>(c)][static_cast<std::size_t>(kstar)] = 1;
        }
    });
    UsageReport report;
    report.count_at_initialization = K;
    report.deterministic_count =
        count_deterministic_allocations(mech.num_bidders, mech.num_items, mech.feasibility);
    for (int k = 0; k < K; ++k) {
        for (int c = 0; c < chunks; ++c) {
            if (part_used[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)]) {
                report.used_indices.push_back(k);
                break;
            }
        }
    }
    report.used_count = static_cast<int>(report.used_indices.size());
    return report;
}

double jaccard_usage_similarity(const std::vector<int>& a, const std::vector<int>& b) {
    std::set<int> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    if (sa.empty() && sb.empty()) return 1.0;
    int common = 0;
    for (int x : sa) common += sb.count(x) ? 1 : 0;
    const int uni = static_cast<int>(sa.size() + sb.size()) - common;
    return static_cast<double>(common) / static_cast<double>(uni);
}

TicketReport lottery_ticket_experiment(const TrainResult& donor, const TrainConfig& small_cfg,
                                       const DistributionSpec& distribution, int data_seeds,
                                       long usage_samples, long eval_samples) {
    if (!donor.initial_params.lottery)
        throw ConfigError("lottery ticket experiment requires a lottery donor run");
    if (donor.initial_params.slots() == 0)
        throw ConfigError("missing initial-parameter snapshot in donor run");
    if (data_seeds < 1) throw ConfigError("ticket experiment needs at least one data seed");

    const DistributionSpec dist = prepare(distribution);
    UsageReport usage = allocation_usage(donor.mechanism, dist, usage_samples, small_cfg.seed);

    TicketReport report;
    report.donor_used_indices = usage.used_indices;

    // Winning ticket: the INITIAL values of the finally-used learnable slots.
    const AmaParameters& init = donor.initial_params;
    AmaParameters ticket;
    ticket.feasibility = init.feasibility;
    ticket.num_bidders = init.num_bidders;
    ticket.num_items = init.num_items;
    ticket.lottery = true;
    ticket.freeze_weights = init.freeze_weights;
    ticket.logits.feasibility = init.feasibility;
    ticket.logits.num_bidders = init.num_bidders;
    ticket.logits.num_items = init.num_items;
    for (int menu_index : usage.used_indices) {
        if (menu_index == 0) continue;  // null slot carries no parameters
        const int slot = menu_index - 1;
        if (init.feasibility == FeasibilityClass::Additive) {
            ticket.logits.additive.push_back(init.logits.additive[static_cast<std::size_t>(slot)]);
        } else {
            ticket.logits.row_logits.push_back(
                init.logits.row_logits[static_cast<std::size_t>(slot)]);
            ticket.logits.col_logits.push_back(
                init.logits.col_logits[static_cast<std::size_t>(slot)]);
        }
        ticket.boosts.push_back(init.boosts[static_cast<std::size_t>(slot)]);
    }
    ticket.logits.slots = static_cast<int>(
        init.feasibility == FeasibilityClass::Additive ? ticket.logits.additive.size()
                                                       : ticket.logits.row_logits.size());
    if (ticket.logits.slots == 0)
        throw ConfigError("donor run used only the null allocation; nothing to retrain");
    ticket.weight_raw = init.weight_raw;
    report.ticket_slots = ticket.logits.slots;

    for (int ds = 0; ds < data_seeds; ++ds) {
        DistributionSpec arm_dist = dist;
        arm_dist.seed = derive_seed(dist.seed, stream::kTicket, static_cast<std::uint64_t>(ds));
        TrainConfig cfg = small_cfg;
        cfg.menu_size = ticket.logits.slots;

        TrainResult ticket_run = train_from(cfg, ticket, arm_dist);
        report.winning_ticket.revenues.push_back(
            evaluate_revenue(ticket_run.mechanism, arm_dist, eval_samples, cfg.seed).mean);

        TrainConfig rand_cfg = cfg;
        rand_cfg.seed = derive_seed(small_cfg.seed, 0xf5e5ULL, static_cast<std::uint64_t>(ds));
        TrainResult random_run = train(rand_cfg, init.feasibility, arm_dist);
        report.random_small.revenues.push_back(
            evaluate_revenue(random_run.mechanism, arm_dist, eval_samples, rand_cfg.seed).mean);
    }

    auto finish = [](TicketArm& arm) {
        double total = 0.0, best = 0.0;
        for (double r : arm.revenues) {
            total += r;
            best = std::max(best, r);
        }
        arm.mean = total / static_cast<double>(arm.revenues.size());
        arm.best = best;
    };
    finish(report.winning_ticket);
    finish(report.random_small);
    return report;
}

const char* kResultCsvHeader =
    "experiment_id,setting,mechanism_kind,K,steps,batch,revenue_mean,revenue_se,max_regret,"
    "used_allocations,wall_clock_s,seed,mechanism_path";

void append_result_csv(const std::string& path, const ResultRow& row) {
    namespace fs = std::filesystem;
    const bool fresh = !fs::exists(path);
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("cannot open results CSV for append: " + path);
    if (fresh) out << kResultCsvHeader << '\n';
    std::ostringstream line;
    line.precision(17);
    line << row.experiment_id << ',' << row.setting << ',' << row.mechanism_kind << ','
         << row.menu_slots << ',' << row.steps << ',' << row.batch << ',' << row.revenue_mean
         << ',' << row.revenue_se << ',' << row.max_regret << ',' << row.used_allocations << ','
         << row.wall_clock_s << ',' << row.seed << ',' << row.mechanism_path;
    out << line.str() << '\n';
}

}  // namespace lotama
