#include "lotama/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "lotama/errors.hpp"

namespace lotama {

std::string to_string(FeasibilityClass cls) {
    return cls == FeasibilityClass::Additive ? "additive" : "unit-demand";
}

FeasibilityClass feasibility_from_string(const std::string& name) {
    if (name == "additive") return FeasibilityClass::Additive;
    if (name == "unit-demand" || name == "unit_demand") return FeasibilityClass::UnitDemand;
    throw ConfigError("unknown feasibility class: " + name);
}

bool allocation_is_feasible(const AllocationMatrix& a, FeasibilityClass cls, double tol) {
    for (double x : a.data) {
        if (!std::isfinite(x) || x < -tol || x > 1.0 + tol) return false;
    }
    for (int j = 0; j < a.cols; ++j) {
        double col = 0.0;
        for (int i = 0; i < a.rows; ++i) col += a(i, j);
        if (col > 1.0 + tol) return false;
    }
    if (cls == FeasibilityClass::UnitDemand) {
        for (int i = 0; i < a.rows; ++i) {
            double row = 0.0;
            for (int j = 0; j < a.cols; ++j) row += a(i, j);
            if (row > 1.0 + tol) return false;
        }
    }
    return true;
}

void AmaMechanism::validate() const {
    if (num_bidders <= 0 || num_items <= 0)
        throw ConfigError("mechanism dimensions must be positive");
    if (allocations.empty() || boosts.size() != allocations.size())
        throw ConfigError("mechanism menu and boosts must have equal nonzero size");
    if (static_cast<int>(weights.size()) != num_bidders)
        throw ConfigError("mechanism weight count must equal bidder count");
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw InvariantViolation("bidder weights must be strictly positive");
    }
    const auto& null_alloc = allocations.front();
    for (double x : null_alloc.data)
        if (x != 0.0) throw InvariantViolation("menu slot 0 must be the all-zero null allocation");
    if (boosts.front() != 0.0)
        throw InvariantViolation("null allocation boost must be 0");
    for (const auto& a : allocations) {
        if (a.rows != num_bidders || a.cols != num_items)
            throw ConfigError("allocation shape does not match mechanism dimensions");
        if (!allocation_is_feasible(a, feasibility))
            throw InvariantViolation("menu contains an infeasible allocation");
    }
}

namespace {

void check_bids(const AmaMechanism& mech, const BidProfile& bids) {
    if (bids.rows != mech.num_bidders || bids.cols != mech.num_items)
        throw ConfigError("bid profile shape does not match mechanism dimensions");
}

// Per-bidder welfare V(i,k) = sum_j (a_k)_ij v_ij for every menu slot.
Matrix bidder_welfare(const AmaMechanism& mech, const BidProfile& bids) {
    const int m = mech.num_bidders;
    const int n = mech.num_items;
    const int K = mech.menu_size();
    Matrix V(m, K);
    for (int k = 0; k < K; ++k) {
        const AllocationMatrix& a = mech.allocations[k];
        for (int i = 0; i < m; ++i) {
            const double* arow = a.row_ptr(i);
            const double* vrow = bids.row_ptr(i);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += arow[j] * vrow[j];
            V(i, k) = acc;
        }
    }
    return V;
}

int argmax_lowest(const std::vector<double>& s) {
    int best = 0;
    for (int k = 1; k < static_cast<int>(s.size()); ++k)
        if (s[k] > s[best]) best = k;
    return best;
}

}  // namespace

std::vector<double> score_allocations(const AmaMechanism& mech, const BidProfile& bids,
                                      std::optional<int> exclude) {
    check_bids(mech, bids);
    if (exclude && (*exclude < 0 || *exclude >= mech.num_bidders))
        throw ConfigError("excluded bidder index out of range");
    const int K = mech.menu_size();
    Matrix V = bidder_welfare(mech, bids);
    std::vector<double> scores(K);
    for (int k = 0; k < K; ++k) {
        double s = mech.boosts[k];
        for (int i = 0; i < mech.num_bidders; ++i) {
            if (exclude && *exclude == i) continue;
            s += mech.weights[i] * V(i, k);
        }
        scores[k] = s;
    }
    return scores;
}

AuctionOutcome run_auction(const AmaMechanism& mech, const BidProfile& bids) {
    check_bids(mech, bids);
    const int m = mech.num_bidders;
    const int K = mech.menu_size();
    Matrix V = bidder_welfare(mech, bids);

    std::vector<double> scores(K);
    for (int k = 0; k < K; ++k) {
        double s = mech.boosts[k];
        for (int i = 0; i < m; ++i) s += mech.weights[i] * V(i, k);
        scores[k] = s;
    }
    const int kstar = argmax_lowest(scores);

    AuctionOutcome out;
    out.winner_index = kstar;
    out.allocation = mech.allocations[kstar];
    out.payments.resize(m);
    out.utilities.resize(m);
    for (int i = 0; i < m; ++i) {
        const double wi = mech.weights[i];
        // max_k of scores with bidder i's welfare removed
        double counterfactual = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
            double s = scores[k] - wi * V(i, k);
            if (s > counterfactual) counterfactual = s;
        }
        const double realized_others = scores[kstar] - wi * V(i, kstar);
        const double p = (counterfactual - realized_others) / wi;
        if (p < kPaymentBugTol)
            throw InvariantViolation("negative payment beyond tolerance for bidder " +
                                     std::to_string(i) + ": " + std::to_string(p));
        out.payments[i] = p;
        out.utilities[i] = V(i, kstar) - p;
    }
    return out;
}

double utility_of_report(const AmaMechanism& mech, const std::vector<double>& true_values,
                         const std::vector<double>& report, int bidder, const BidProfile& others) {
    if (static_cast<int>(true_values.size()) != mech.num_items ||
        static_cast<int>(report.size()) != mech.num_items)
        throw ConfigError("value vector length does not match item count");
    if (bidder < 0 || bidder >= mech.num_bidders) throw ConfigError("bidder index out of range");
    BidProfile profile = others;
    for (int j = 0; j < mech.num_items; ++j) profile(bidder, j) = report[j];
    AuctionOutcome out = run_auction(mech, profile);
    double value = 0.0;
    for (int j = 0; j < mech.num_items; ++j) value += out.allocation(bidder, j) * true_values[j];
    return value - out.payments[bidder];
}

double truthful_utility(const AmaMechanism& mech, const std::vector<double>& own, int bidder,
                        const BidProfile& others) {
    return utility_of_report(mech, own, own, bidder, others);
}

std::vector<AllocationMatrix> enumerate_deterministic_allocations(int num_bidders, int num_items,
                                                                  FeasibilityClass cls,
                                                                  std::int64_t guard) {
    if (num_bidders <= 0 || num_items <= 0)
        throw ConfigError("enumeration requires positive bidder and item counts");
    // (m+1)^n item dispositions is the enumeration work, before filtering.
    std::int64_t total = 1;
    for (int j = 0; j < num_items; ++j) {
        if (total > guard / (num_bidders + 1) + 1) {
            total = guard + 1;
            break;
        }
        total *= num_bidders + 1;
    }
    if (total > guard) {
        std::ostringstream msg;
        msg << "refusing to enumerate deterministic allocations: (" << num_bidders << "+1)^"
            << num_items << " item dispositions exceed the guard of " << guard;
        throw ConfigError(msg.str());
    }

    std::vector<AllocationMatrix> result;
    std::vector<int> disposition(num_items, 0);  // 0 = unassigned, 1..m = bidder+1
    std::vector<int> items_per_bidder(num_bidders, 0);
    for (std::int64_t t = 0; t < total; ++t) {
        std::int64_t rem = t;
        std::fill(items_per_bidder.begin(), items_per_bidder.end(), 0);
        bool feasible = true;
        for (int j = 0; j < num_items; ++j) {
            int d = static_cast<int>(rem % (num_bidders + 1));
            rem /= num_bidders + 1;
            disposition[j] = d;
            if (d > 0 && cls == FeasibilityClass::UnitDemand && ++items_per_bidder[d - 1] > 1) {
                feasible = false;
                break;
            }
        }
        if (!feasible) continue;
        AllocationMatrix a(num_bidders, num_items);
        for (int j = 0; j < num_items; ++j)
            if (disposition[j] > 0) a(disposition[j] - 1, j) = 1.0;
        result.push_back(std::move(a));
    }
    return result;
}

std::int64_t count_deterministic_allocations(int num_bidders, int num_items,
                                             FeasibilityClass cls) {
    const std::int64_t cap = std::numeric_limits<std::int64_t>::max();
    if (cls == FeasibilityClass::Additive) {
        std::int64_t total = 1;
        for (int j = 0; j < num_items; ++j) {
            if (total > cap / (num_bidders + 1)) return cap;
            total *= num_bidders + 1;
        }
        return total;
    }
    // Partial matchings: sum_k C(m,k) * C(n,k) * k!
    const int kmax = std::min(num_bidders, num_items);
    long double total = 0.0L;
    long double term = 1.0L;  // k = 0
    for (int k = 0; k <= kmax; ++k) {
        total += term;
        // C(m,k+1) C(n,k+1) (k+1)! = C(m,k) C(n,k) k! * (m-k)(n-k)/(k+1)
        term *= static_cast<long double>(num_bidders - k) * (num_items - k) /
                static_cast<long double>(k + 1);
    }
    if (total > static_cast<long double>(cap)) return cap;
    return static_cast<std::int64_t>(total + 0.5L);
}

std::string mechanism_to_json(const AmaMechanism& mech) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["m"] = mech.num_bidders;
    j["n"] = mech.num_items;
    j["feasibility_class"] = to_string(mech.feasibility);
    j["weights"] = mech.weights;
    j["boosts"] = mech.boosts;
    auto allocs = nlohmann::json::array();
    for (const auto& a : mech.allocations) {
        auto rows = nlohmann::json::array();
        for (int i = 0; i < a.rows; ++i) {
            auto row = nlohmann::json::array();
            for (int jj = 0; jj < a.cols; ++jj) row.push_back(a(i, jj));
            rows.push_back(std::move(row));
        }
        allocs.push_back(std::move(rows));
    }
    j["allocations"] = std::move(allocs);
    return j.dump();
}

AmaMechanism mechanism_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid mechanism JSON: ") + e.what());
    }
    AmaMechanism mech;
    try {
        if (j.at("format_version").get<int>() != 1)
            throw ConfigError("unsupported mechanism format_version");
        mech.num_bidders = j.at("m").get<int>();
        mech.num_items = j.at("n").get<int>();
        mech.feasibility = feasibility_from_string(j.at("feasibility_class").get<std::string>());
        mech.weights = j.at("weights").get<std::vector<double>>();
        mech.boosts = j.at("boosts").get<std::vector<double>>();
        for (const auto& rows : j.at("allocations")) {
            AllocationMatrix a(mech.num_bidders, mech.num_items);
            int i = 0;
            for (const auto& row : rows) {
                int jj = 0;
                for (const auto& x : row) a(i, jj++) = x.get<double>();
                ++i;
            }
            mech.allocations.push_back(std::move(a));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid mechanism JSON: ") + e.what());
    }
    mech.validate();
    return mech;
}

void save_mechanism(const AmaMechanism& mech, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << mechanism_to_json(mech) << '\n';
}

AmaMechanism load_mechanism(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mechanism file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return mechanism_from_json(buf.str());
}

}  // namespace lotama
