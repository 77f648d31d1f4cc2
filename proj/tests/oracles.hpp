#pragma once

// Test-only oracles, kept independent of the library's implementation paths:
// literal re-evaluations of the affine maximizer definitions with separate
// loop structure, a recursive allocation enumerator, a direct VCG, and a
// central-difference gradient checker.

#include <cmath>
#include <functional>
#include <vector>

#include "lotama/matrix.hpp"
#include "lotama/mechanism.hpp"

namespace oracle {

using lotama::AllocationMatrix;
using lotama::AmaMechanism;
using lotama::BidProfile;
using lotama::FeasibilityClass;
using lotama::Matrix;

// Weighted, boosted welfare of one menu slot, straight from the definition.
inline double slot_score(const AmaMechanism& mech, const BidProfile& bids, int k,
                         int excluded = -1) {
    double s = mech.boosts[static_cast<std::size_t>(k)];
    for (int i = 0; i < mech.num_bidders; ++i) {
        if (i == excluded) continue;
        for (int j = 0; j < mech.num_items; ++j)
            s += mech.weights[static_cast<std::size_t>(i)] *
                 mech.allocations[static_cast<std::size_t>(k)](i, j) * bids(i, j);
    }
    return s;
}

inline std::vector<double> brute_scores(const AmaMechanism& mech, const BidProfile& bids,
                                        int excluded = -1) {
    std::vector<double> out;
    for (int k = 0; k < mech.menu_size(); ++k) out.push_back(slot_score(mech, bids, k, excluded));
    return out;
}

inline int brute_argmax(const std::vector<double>& s) {
    int best = 0;
    for (std::size_t k = 1; k < s.size(); ++k)
        if (s[k] > s[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    return best;
}

// Payment of bidder i per the counterfactual definition: welfare of others
// (weighted, boosted) under the without-i winner minus under the actual
// winner, rescaled by 1/w_i.
inline double brute_payment(const AmaMechanism& mech, const BidProfile& bids, int bidder) {
    const auto full = brute_scores(mech, bids);
    const int kstar = brute_argmax(full);
    const auto without = brute_scores(mech, bids, bidder);
    const int kminus = brute_argmax(without);
    const double counterfactual = slot_score(mech, bids, kminus, bidder);
    const double realized = slot_score(mech, bids, kstar, bidder);
    return (counterfactual - realized) / mech.weights[static_cast<std::size_t>(bidder)];
}

inline double brute_total_payment(const AmaMechanism& mech, const BidProfile& bids) {
    double total = 0.0;
    for (int i = 0; i < mech.num_bidders; ++i) total += std::max(0.0, brute_payment(mech, bids, i));
    return total;
}

// Recursive enumeration of deterministic feasible allocations (items assigned
// one at a time), independent of the library's positional scheme.
inline void enumerate_rec(int item, int m, int n, FeasibilityClass cls, AllocationMatrix& cur,
                          std::vector<int>& load, std::vector<AllocationMatrix>& out) {
    if (item == n) {
        out.push_back(cur);
        return;
    }
    enumerate_rec(item + 1, m, n, cls, cur, load, out);  // item unassigned
    for (int i = 0; i < m; ++i) {
        if (cls == FeasibilityClass::UnitDemand && load[static_cast<std::size_t>(i)] >= 1) continue;
        cur(i, item) = 1.0;
        ++load[static_cast<std::size_t>(i)];
        enumerate_rec(item + 1, m, n, cls, cur, load, out);
        --load[static_cast<std::size_t>(i)];
        cur(i, item) = 0.0;
    }
}

inline std::vector<AllocationMatrix> brute_enumerate(int m, int n, FeasibilityClass cls) {
    std::vector<AllocationMatrix> out;
    AllocationMatrix cur(m, n);
    std::vector<int> load(static_cast<std::size_t>(m), 0);
    enumerate_rec(0, m, n, cls, cur, load, out);
    return out;
}

// Direct VCG on the enumerated menu: welfare argmax and Clarke payments,
// written without the score/boost machinery.
struct VcgOutcome {
    int winner = 0;
    std::vector<double> payments;
};

inline VcgOutcome direct_vcg(const std::vector<AllocationMatrix>& menu, const BidProfile& bids) {
    const int m = bids.rows;
    const int n = bids.cols;
    auto welfare = [&](const AllocationMatrix& a, int skip) {
        double total = 0.0;
        for (int i = 0; i < m; ++i) {
            if (i == skip) continue;
            for (int j = 0; j < n; ++j) total += a(i, j) * bids(i, j);
        }
        return total;
    };
    VcgOutcome out;
    double best = -1.0;
    for (std::size_t k = 0; k < menu.size(); ++k) {
        const double w = welfare(menu[k], -1);
        if (w > best) {
            best = w;
            out.winner = static_cast<int>(k);
        }
    }
    out.payments.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double best_without = -1.0;
        for (const auto& a : menu) best_without = std::max(best_without, welfare(a, i));
        out.payments[static_cast<std::size_t>(i)] =
            best_without - welfare(menu[static_cast<std::size_t>(out.winner)], i);
    }
    return out;
}

// Central finite differences of a scalar function of a flat parameter
// vector; returns max relative error against the analytic gradient using a
// floored denominator.
inline double max_relative_gradient_error(const std::function<double(const std::vector<double>&)>& f,
                                          std::vector<double> point,
                                          const std::vector<double>& analytic, double step = 1e-5,
                                          double floor = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < point.size(); ++i) {
        const double keep = point[i];
        point[i] = keep + step;
        const double up = f(point);
        point[i] = keep - step;
        const double down = f(point);
        point[i] = keep;
        const double fd = (up - down) / (2.0 * step);
        const double denom = std::max({std::abs(fd), std::abs(analytic[i]), floor});
        worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
    }
    return worst;
}

}  // namespace oracle
