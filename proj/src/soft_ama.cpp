#include "lotama/soft_ama.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "lotama/errors.hpp"
#include "lotama/parallel.hpp"
#include "lotama/rng.hpp"

namespace lotama {

namespace {

constexpr double kWeightFloor = 1e-6;
constexpr int kMaxChunks = 32;

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// raw such that softplus(raw) + floor == 1
double unit_weight_raw() { return std::log(std::expm1(1.0 - kWeightFloor)); }

}  // namespace

AmaParameters AmaParameters::random_init(FeasibilityClass cls, int num_bidders, int num_items,
                                         int slots, std::uint64_t seed, bool freeze_weights) {
    AmaParameters p;
    p.feasibility = cls;
    p.num_bidders = num_bidders;
    p.num_items = num_items;
    p.lottery = true;
    p.logits = AllocationLogits::random_init(cls, num_bidders, num_items, slots, seed);
    p.boosts.assign(slots, 0.0);
    p.weight_raw.assign(num_bidders, unit_weight_raw());
    p.freeze_weights = freeze_weights;
    return p;
}

AmaParameters AmaParameters::fixed_menu_init(FeasibilityClass cls,
                                             std::vector<AllocationMatrix> menu_with_null,
                                             int num_bidders, int num_items, bool freeze_weights) {
    if (menu_with_null.empty()) throw ConfigError("fixed menu must be nonempty");
    for (double x : menu_with_null.front().data)
        if (x != 0.0) throw ConfigError("fixed menu must start with the null allocation");
    AmaParameters p;
    p.feasibility = cls;
    p.num_bidders = num_bidders;
    p.num_items = num_items;
    p.lottery = false;
    p.fixed_menu.assign(menu_with_null.begin() + 1, menu_with_null.end());
    p.boosts.assign(p.fixed_menu.size(), 0.0);
    p.weight_raw.assign(num_bidders, unit_weight_raw());
    p.freeze_weights = freeze_weights;
    return p;
}

std::vector<double> AmaParameters::weights() const {
    std::vector<double> w(weight_raw.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = softplus(weight_raw[i]) + kWeightFloor;
    return w;
}

std::vector<AllocationMatrix> AmaParameters::materialize() const {
    if (lottery) return materialize_menu(logits);
    std::vector<AllocationMatrix> menu;
    menu.reserve(fixed_menu.size() + 1);
    menu.emplace_back(num_bidders, num_items);
    for (const auto& a : fixed_menu) menu.push_back(a);
    return menu;
}

AmaMechanism AmaParameters::to_mechanism() const {
    AmaMechanism mech;
    mech.num_bidders = num_bidders;
    mech.num_items = num_items;
    mech.feasibility = feasibility;
    mech.allocations = materialize();
    mech.boosts.assign(1, 0.0);
    mech.boosts.insert(mech.boosts.end(), boosts.begin(), boosts.end());
    mech.weights = weights();
    mech.validate();
    return mech;
}

std::size_t AmaParameters::flat_size() const {
    std::size_t total = lottery ? logits.param_count() : 0;
    total += boosts.size();
    if (!freeze_weights) total += weight_raw.size();
    return total;
}

std::vector<double> AmaParameters::to_flat() const {
    std::vector<double> flat;
    flat.reserve(flat_size());
    if (lottery) {
        if (feasibility == FeasibilityClass::Additive) {
            for (const auto& L : logits.additive)
                flat.insert(flat.end(), L.data.begin(), L.data.end());
        } else {
            for (int k = 0; k < logits.slots; ++k) {
                const auto& R = logits.row_logits[k];
                const auto& C = logits.col_logits[k];
                flat.insert(flat.end(), R.data.begin(), R.data.end());
                flat.insert(flat.end(), C.data.begin(), C.data.end());
            }
        }
    }
    flat.insert(flat.end(), boosts.begin(), boosts.end());
    if (!freeze_weights) flat.insert(flat.end(), weight_raw.begin(), weight_raw.end());
    return flat;
}

void AmaParameters::from_flat(std::span<const double> flat) {
    if (flat.size() != flat_size()) throw ConfigError("flat parameter size mismatch");
    std::size_t pos = 0;
    auto take = [&](std::vector<double>& dst) {
        std::copy(flat.begin() + pos, flat.begin() + pos + dst.size(), dst.begin());
        pos += dst.size();
    };
    if (lottery) {
        if (feasibility == FeasibilityClass::Additive) {
            for (auto& L : logits.additive) take(L.data);
        } else {
            for (int k = 0; k < logits.slots; ++k) {
                take(logits.row_logits[k].data);
                take(logits.col_logits[k].data);
            }
        }
    }
    take(boosts);
    if (!freeze_weights) take(weight_raw);
}

GradientBundle GradientBundle::zeros_like(const AmaParameters& params) {
    GradientBundle g;
    if (params.lottery) {
        if (params.feasibility == FeasibilityClass::Additive) {
            for (const auto& L : params.logits.additive) g.d_additive.emplace_back(L.rows, L.cols);
        } else {
            for (int k = 0; k < params.logits.slots; ++k) {
                const auto& R = params.logits.row_logits[k];
                const auto& C = params.logits.col_logits[k];
                g.d_row_logits.emplace_back(R.rows, R.cols);
                g.d_col_logits.emplace_back(C.rows, C.cols);
            }
        }
    }
    g.d_boosts.assign(params.boosts.size(), 0.0);
    g.d_weight_raw.assign(params.freeze_weights ? 0 : params.weight_raw.size(), 0.0);
    return g;
}

std::vector<double> GradientBundle::to_flat(const AmaParameters& params) const {
    std::vector<double> flat;
    flat.reserve(params.flat_size());
    if (params.lottery) {
        if (params.feasibility == FeasibilityClass::Additive) {
            for (const auto& G : d_additive) flat.insert(flat.end(), G.data.begin(), G.data.end());
        } else {
            for (std::size_t k = 0; k < d_row_logits.size(); ++k) {
                flat.insert(flat.end(), d_row_logits[k].data.begin(), d_row_logits[k].data.end());
                flat.insert(flat.end(), d_col_logits[k].data.begin(), d_col_logits[k].data.end());
            }
        }
    }
    flat.insert(flat.end(), d_boosts.begin(), d_boosts.end());
    flat.insert(flat.end(), d_weight_raw.begin(), d_weight_raw.end());
    return flat;
}

std::vector<double> soft_choice(std::span<const double> scores, const SoftConfig& cfg) {
    if (!(cfg.sharpness > 0.0)) throw ConfigError("softmax sharpness must be positive");
    std::vector<double> probs(scores.size());
    double hi = -std::numeric_limits<double>::infinity();
    for (double s : scores) {
        if (!std::isfinite(s)) throw NumericalError("non-finite score in soft_choice");
        hi = std::max(hi, s);
    }
    double denom = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        probs[k] = std::exp(cfg.sharpness * (scores[k] - hi));
        denom += probs[k];
    }
    for (double& p : probs) p /= denom;
    return probs;
}

namespace {

// Flattened menu and per-profile scratch for the soft forward/backward pass.
struct SoftEngine {
    int m, n, K1;  // K1 = learnable slots + null
    double lambda;
    std::vector<double> w;
    std::vector<double> A;  // K1 x m x n, slot-major
    std::vector<double> b;  // K1, b[0] = 0

    SoftEngine(const AmaParameters& params, const SoftConfig& cfg) {
        m = params.num_bidders;
        n = params.num_items;
        lambda = cfg.sharpness;
        if (!(lambda > 0.0)) throw ConfigError("softmax sharpness must be positive");
        w = params.weights();
        auto menu = params.materialize();
        K1 = static_cast<int>(menu.size());
        A.resize(static_cast<std::size_t>(K1) * m * n);
        for (int k = 0; k < K1; ++k)
            std::memcpy(&A[static_cast<std::size_t>(k) * m * n], menu[k].data.data(),
                        sizeof(double) * m * n);
        b.assign(1, 0.0);
        b.insert(b.end(), params.boosts.begin(), params.boosts.end());
    }

    const double* alloc_row(int k, int i) const {
        return &A[(static_cast<std::size_t>(k) * m + i) * n];
    }
};

struct Scratch {
    std::vector<double> V;    // m x K1: per-bidder welfare
    std::vector<double> s;    // K1: full scores
    std::vector<double> g;    // K1: softmax(lambda s)
    std::vector<double> x;    // m x K1: scores excluding bidder i
    std::vector<double> sig;  // m x K1: softmax(lambda x_i)
    std::vector<double> SM;   // m
    std::vector<double> T;    // m
    std::vector<double> Gx;   // m x K1
    std::vector<double> Gb;   // K1

    void resize(int m, int K1) {
        V.resize(static_cast<std::size_t>(m) * K1);
        s.resize(K1);
        g.resize(K1);
        x.resize(static_cast<std::size_t>(m) * K1);
        sig.resize(static_cast<std::size_t>(m) * K1);
        SM.resize(m);
        T.resize(m);
        Gx.resize(static_cast<std::size_t>(m) * K1);
        Gb.resize(K1);
    }
};

void softmax_inplace(const double* vals, double* out, int count, double lambda) {
    double hi = vals[0];
    for (int k = 1; k < count; ++k) hi = std::max(hi, vals[k]);
    double denom = 0.0;
    for (int k = 0; k < count; ++k) {
        out[k] = std::exp(lambda * (vals[k] - hi));
        denom += out[k];
    }
    const double inv = 1.0 / denom;
    for (int k = 0; k < count; ++k) out[k] *= inv;
}

// Forward (and optionally backward) pass for one profile. Returns the soft
// total payment. When accumulating, grad buffers follow the engine layout:
// grad_alloc K1*m*n, grad_boost K1, grad_w m (materialized-weight gradient).
double soft_profile(const SoftEngine& e, const BidProfile& bids, Scratch& sc, bool backward,
                    double* grad_alloc, double* grad_boost, double* grad_w) {
    const int m = e.m, n = e.n, K1 = e.K1;
    const double lambda = e.lambda;
    sc.resize(m, K1);

    for (int k = 0; k < K1; ++k) {
        double stot = e.b[k];
        for (int i = 0; i < m; ++i) {
            const double* arow = e.alloc_row(k, i);
            const double* vrow = bids.row_ptr(i);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += arow[j] * vrow[j];
            sc.V[static_cast<std::size_t>(i) * K1 + k] = acc;
            stot += e.w[i] * acc;
        }
        sc.s[k] = stot;
    }
    softmax_inplace(sc.s.data(), sc.g.data(), K1, lambda);

    double revenue = 0.0;
    for (int i = 0; i < m; ++i) {
        double* xi = &sc.x[static_cast<std::size_t>(i) * K1];
        const double* Vi = &sc.V[static_cast<std::size_t>(i) * K1];
        for (int k = 0; k < K1; ++k) xi[k] = sc.s[k] - e.w[i] * Vi[k];
        double* sigi = &sc.sig[static_cast<std::size_t>(i) * K1];
        softmax_inplace(xi, sigi, K1, lambda);
        double sm = 0.0, t = 0.0;
        for (int k = 0; k < K1; ++k) {
            sm += sigi[k] * xi[k];
            t += sc.g[k] * xi[k];
        }
        sc.SM[i] = sm;
        sc.T[i] = t;
        revenue += (sm - t) / e.w[i];
    }
    if (!backward) return revenue;

    // dR/dx^{(i)}_k and the boost/score adjoints
    for (int i = 0; i < m; ++i) {
        const double* xi = &sc.x[static_cast<std::size_t>(i) * K1];
        const double* sigi = &sc.sig[static_cast<std::size_t>(i) * K1];
        double* Gxi = &sc.Gx[static_cast<std::size_t>(i) * K1];
        const double invw = 1.0 / e.w[i];
        for (int k = 0; k < K1; ++k)
            Gxi[k] = (sigi[k] * (1.0 + lambda * (xi[k] - sc.SM[i])) - sc.g[k]) * invw;
    }
    for (int k = 0; k < K1; ++k) {
        double gs = 0.0;
        for (int i = 0; i < m; ++i)
            gs += (sc.x[static_cast<std::size_t>(i) * K1 + k] - sc.T[i]) / e.w[i];
        gs *= -lambda * sc.g[k];
        double gb = gs;
        for (int i = 0; i < m; ++i) gb += sc.Gx[static_cast<std::size_t>(i) * K1 + k];
        sc.Gb[k] = gb;
        grad_boost[k] += gb;
    }
    // dR/dW_ik = Gb[k] - Gx[i][k]; chain into allocations (and weights)
    for (int k = 0; k < K1; ++k) {
        for (int i = 0; i < m; ++i) {
            const double gW = sc.Gb[k] - sc.Gx[static_cast<std::size_t>(i) * K1 + k];
            const double scale = gW * e.w[i];
            double* ga = grad_alloc + (static_cast<std::size_t>(k) * m + i) * n;
            const double* vrow = bids.row_ptr(i);
            for (int j = 0; j < n; ++j) ga[j] += scale * vrow[j];
            if (grad_w)
                grad_w[i] += gW * sc.V[static_cast<std::size_t>(i) * K1 + k];
        }
    }
    if (grad_w) {
        for (int i = 0; i < m; ++i)
            grad_w[i] -= (sc.SM[i] - sc.T[i]) / (e.w[i] * e.w[i]);
    }
    return revenue;
}

void check_batch(const AmaParameters& params, const std::vector<BidProfile>& batch) {
    if (batch.empty()) throw ConfigError("bid batch must be nonempty");
    for (const auto& bids : batch)
        if (bids.rows != params.num_bidders || bids.cols != params.num_items)
            throw ConfigError("bid profile shape does not match parameters");
}

}  // namespace

double soft_revenue(const AmaParameters& params, const std::vector<BidProfile>& batch,
                    const SoftConfig& cfg) {
    check_batch(params, batch);
    SoftEngine engine(params, cfg);
    const long count = static_cast<long>(batch.size());
    const int chunks = static_cast<int>(std::min<long>(kMaxChunks, count));
    std::vector<double> partial(chunks, 0.0);
    parallel_chunks(chunks, [&](int c) {
        Scratch sc;
        double acc = 0.0;
        const long lo = chunk_begin(count, chunks, c);
        const long hi = chunk_begin(count, chunks, c + 1);
        for (long p = lo; p < hi; ++p)
            acc += soft_profile(engine, batch[p], sc, false, nullptr, nullptr, nullptr);
        partial[c] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total / static_cast<double>(count);
}

GradientBundle soft_revenue_gradient(const AmaParameters& params,
                                     const std::vector<BidProfile>& batch, const SoftConfig& cfg,
                                     double* revenue_out) {
    check_batch(params, batch);
    SoftEngine engine(params, cfg);
    const int m = engine.m, n = engine.n, K1 = engine.K1;
    const long count = static_cast<long>(batch.size());
    const int chunks = static_cast<int>(std::min<long>(kMaxChunks, count));
    const bool want_w = !params.freeze_weights;

    const std::size_t alloc_sz = static_cast<std::size_t>(K1) * m * n;
    std::vector<std::vector<double>> part_alloc(chunks), part_boost(chunks), part_w(chunks);
    std::vector<double> part_rev(chunks, 0.0);
    parallel_chunks(chunks, [&](int c) {
        part_alloc[c].assign(alloc_sz, 0.0);
        part_boost[c].assign(K1, 0.0);
        part_w[c].assign(want_w ? m : 0, 0.0);
        Scratch sc;
        double acc = 0.0;
        const long lo = chunk_begin(count, chunks, c);
        const long hi = chunk_begin(count, chunks, c + 1);
        for (long p = lo; p < hi; ++p)
            acc += soft_profile(engine, batch[p], sc, true, part_alloc[c].data(),
                                part_boost[c].data(), want_w ? part_w[c].data() : nullptr);
        part_rev[c] = acc;
    });

    // Deterministic reduction in chunk order, then the batch mean.
    std::vector<double> grad_alloc(alloc_sz, 0.0), grad_boost(K1, 0.0), grad_w(want_w ? m : 0, 0.0);
    double revenue = 0.0;
    for (int c = 0; c < chunks; ++c) {
        revenue += part_rev[c];
        for (std::size_t idx = 0; idx < alloc_sz; ++idx) grad_alloc[idx] += part_alloc[c][idx];
        for (int k = 0; k < K1; ++k) grad_boost[k] += part_boost[c][k];
        for (int i = 0; i < static_cast<int>(grad_w.size()); ++i) grad_w[i] += part_w[c][i];
    }
    const double inv = 1.0 / static_cast<double>(count);
    revenue *= inv;
    for (double& x : grad_alloc) x *= inv;
    for (double& x : grad_boost) x *= inv;
    for (double& x : grad_w) x *= inv;
    if (revenue_out) *revenue_out = revenue;

    GradientBundle bundle = GradientBundle::zeros_like(params);
    for (int k = 1; k < K1; ++k) bundle.d_boosts[k - 1] = grad_boost[k];
    if (params.lottery) {
        for (int k = 1; k < K1; ++k) {
            Matrix ga(m, n);
            std::memcpy(ga.data.data(), &grad_alloc[static_cast<std::size_t>(k) * m * n],
                        sizeof(double) * m * n);
            if (params.feasibility == FeasibilityClass::Additive) {
                materialize_additive_backward(params.logits.additive[k - 1], ga,
                                              bundle.d_additive[k - 1]);
            } else {
                materialize_unit_demand_backward(params.logits.row_logits[k - 1],
                                                 params.logits.col_logits[k - 1], ga,
                                                 bundle.d_row_logits[k - 1],
                                                 bundle.d_col_logits[k - 1]);
            }
        }
    }
    if (want_w) {
        for (int i = 0; i < m; ++i)
            bundle.d_weight_raw[i] = grad_w[i] * sigmoid(params.weight_raw[i]);
    }

    const std::vector<double> flat = bundle.to_flat(params);
    for (std::size_t idx = 0; idx < flat.size(); ++idx) {
        if (!std::isfinite(flat[idx]))
            throw NumericalError("non-finite gradient at flat parameter index " +
                                 std::to_string(idx));
    }
    return bundle;
}

double exact_total_payment(const AmaMechanism& mech, const BidProfile& bids) {
    const int m = mech.num_bidders;
    const int n = mech.num_items;
    const int K = mech.menu_size();
    // winner determination
    thread_local std::vector<double> V, s;
    V.resize(static_cast<std::size_t>(m) * K);
    s.resize(K);
    for (int k = 0; k < K; ++k) {
        double stot = mech.boosts[k];
        for (int i = 0; i < m; ++i) {
            const double* arow = mech.allocations[k].row_ptr(i);
            const double* vrow = bids.row_ptr(i);
            double acc = 0.0;
            for (int j = 0; j < n; ++j) acc += arow[j] * vrow[j];
            V[static_cast<std::size_t>(i) * K + k] = acc;
            stot += mech.weights[i] * acc;
        }
        s[k] = stot;
    }
    int kstar = 0;
    for (int k = 1; k < K; ++k)
        if (s[k] > s[kstar]) kstar = k;
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
        const double wi = mech.weights[i];
        double counterfactual = -std::numeric_limits<double>::infinity();
        const double* Vi = &V[static_cast<std::size_t>(i) * K];
        for (int k = 0; k < K; ++k) {
            const double sk = s[k] - wi * Vi[k];
            if (sk > counterfactual) counterfactual = sk;
        }
        const double p = (counterfactual - (s[kstar] - wi * Vi[kstar])) / wi;
        if (p < kPaymentBugTol)
            throw InvariantViolation("negative payment beyond tolerance in exact evaluation");
        total += p > 0.0 ? p : 0.0;  // clip tiny negatives in reported revenue
    }
    return total;
}

}  // namespace lotama
