#include "lotama/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "lotama/errors.hpp"
#include "lotama/rng.hpp"

namespace lotama {

namespace {

// Revenue of a second-price auction with reserve r on one profile of scalar
// bids: highest bidder wins at max(second highest, r) if they clear r.
double second_price_reserve_payment(const std::vector<double>& bids, double reserve) {
    double first = -1.0, second = -1.0;
    for (double b : bids) {
        if (b > first) {
            second = first;
            first = b;
        } else if (b > second) {
            second = b;
        }
    }
    if (first < reserve) return 0.0;
    return std::max(second, reserve);
}

}  // namespace

MyersonResult myerson_uniform_item(int bidders, double lo, double hi) {
    if (bidders < 1) throw ConfigError("myerson requires at least one bidder");
    if (!(lo >= 0.0) || !(hi > lo)) throw ConfigError("myerson requires 0 <= lo < hi");
    MyersonResult out;
    // virtual value phi(v) = 2v - hi vanishes at hi/2
    out.reserve = std::max(lo, hi / 2.0);
    if (lo == 0.0) {
        // E[max(0, max_i phi(v_i))] for U[0,1], scaled by hi:
        // integral_0^1 (1 - ((1+t)/2)^m) dt = 1 - (2^(m+1) - 1) / (2^m (m+1))
        const double m = static_cast<double>(bidders);
        const double closed =
            1.0 - (std::pow(2.0, m + 1.0) - 1.0) / (std::pow(2.0, m) * (m + 1.0));
        out.revenue = hi * closed;
        return out;
    }
    // Simpson quadrature of P(max_i phi(v_i) > t) over t in [0, phi(hi)].
    const double span = hi - lo;
    const double top = 2.0 * hi - hi;  // phi(hi) = hi
    auto tail = [&](double t) {
        double cdf = ((t + hi) / 2.0 - lo) / span;  // P(phi(v) <= t)
        cdf = std::clamp(cdf, 0.0, 1.0);
        return 1.0 - std::pow(cdf, static_cast<double>(bidders));
    };
    const int intervals = 200000;
    double acc = tail(0.0) + tail(top);
    for (int i = 1; i < intervals; ++i) {
        const double t = top * i / intervals;
        acc += tail(t) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    out.revenue = acc * top / intervals / 3.0;
    return out;
}

double second_price_reserve_revenue_mc(int bidders, double lo, double hi, double reserve,
                                       long samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("sample count must be >= 1");
    Rng rng(derive_seed(seed, stream::kEval, 0x3b1dULL));
    std::uniform_real_distribution<double> uni(lo, hi);
    std::vector<double> bids(static_cast<std::size_t>(bidders));
    double total = 0.0;
    for (long s = 0; s < samples; ++s) {
        for (double& b : bids) b = uni(rng);
        total += second_price_reserve_payment(bids, reserve);
    }
    return total / static_cast<double>(samples);
}

BundleResult grand_bundle_revenue(const DistributionSpec& raw, long train_samples,
                                  long test_samples, std::uint64_t seed) {
    DistributionSpec spec = prepare(raw);
    spec.seed = derive_seed(spec.seed, seed);
    if (train_samples < 10000 || test_samples < 10000)
        std::fprintf(stderr,
                     "warning: grand bundle reserve search with fewer than 10^4 samples is "
                     "noisy\n");

    auto bundle_values = [&](long count, std::uint64_t stream) {
        auto batch = sample_batch(spec, count, stream);
        std::vector<std::vector<double>> bundles(static_cast<std::size_t>(count));
        for (long p = 0; p < count; ++p) {
            std::vector<double> row(static_cast<std::size_t>(spec.num_bidders), 0.0);
            for (int i = 0; i < spec.num_bidders; ++i) {
                double acc = 0.0;
                for (int j = 0; j < spec.num_items; ++j) acc += batch[p](i, j);
                row[i] = acc;
            }
            bundles[static_cast<std::size_t>(p)] = std::move(row);
        }
        return bundles;
    };

    const auto train = bundle_values(train_samples, stream::kReserveTrain);
    const auto test = bundle_values(test_samples, stream::kReserveTest);

    double cap = 0.0;
    for (const auto& row : train)
        for (double b : row) cap = std::max(cap, b);

    auto revenue_at = [](const std::vector<std::vector<double>>& data, double reserve) {
        double total = 0.0;
        for (const auto& row : data) total += second_price_reserve_payment(row, reserve);
        return total / static_cast<double>(data.size());
    };

    // dense grid, then local refinement around the best grid point
    double best_reserve = 0.0, best_rev = revenue_at(train, 0.0);
    const int grid = 1000;
    for (int g = 1; g <= grid; ++g) {
        const double r = cap * g / grid;
        const double rev = revenue_at(train, r);
        if (rev > best_rev) {
            best_rev = rev;
            best_reserve = r;
        }
    }
    const double step = cap / grid;
    const double lo_r = std::max(0.0, best_reserve - step);
    const double hi_r = std::min(cap, best_reserve + step);
    const int fine = 200;
    for (int g = 0; g <= fine; ++g) {
        const double r = lo_r + (hi_r - lo_r) * g / fine;
        const double rev = revenue_at(train, r);
        if (rev > best_rev) {
            best_rev = rev;
            best_reserve = r;
        }
    }

    BundleResult out;
    out.reserve = best_reserve;
    double total = 0.0, total_sq = 0.0;
    for (const auto& row : test) {
        const double p = second_price_reserve_payment(row, best_reserve);
        total += p;
        total_sq += p * p;
    }
    const double n = static_cast<double>(test.size());
    out.revenue = total / n;
    const double var = std::max(0.0, total_sq / n - out.revenue * out.revenue);
    out.se = std::sqrt(var / n);
    return out;
}

AmaMechanism vcg_mechanism(int num_bidders, int num_items, FeasibilityClass cls) {
    AmaMechanism mech;
    mech.num_bidders = num_bidders;
    mech.num_items = num_items;
    mech.feasibility = cls;
    mech.allocations = enumerate_deterministic_allocations(num_bidders, num_items, cls);
    mech.boosts.assign(mech.allocations.size(), 0.0);
    mech.weights.assign(static_cast<std::size_t>(num_bidders), 1.0);
    mech.validate();
    return mech;
}

TrainResult train_deterministic_ama(const TrainConfig& cfg, FeasibilityClass feasibility,
                                    const DistributionSpec& distribution) {
    auto menu = enumerate_deterministic_allocations(distribution.num_bidders,
                                                    distribution.num_items, feasibility);
    AmaParameters params = AmaParameters::fixed_menu_init(
        feasibility, std::move(menu), distribution.num_bidders, distribution.num_items,
        cfg.freeze_weights);
    return train_from(cfg, params, distribution);
}

}  // namespace lotama
