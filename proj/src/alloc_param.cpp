#include "lotama/alloc_param.hpp"

#include <cmath>

#include "lotama/errors.hpp"
#include "lotama/rng.hpp"

namespace lotama {

namespace {

constexpr double kDenomGuard = 1e-12;

void require_finite(const Matrix& logits) {
    if (!logits.all_finite()) throw NumericalError("non-finite allocation logits");
}

double softplus(double x) {
    // overflow-safe: softplus(x) = max(x, 0) + log1p(exp(-|x|))
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace

AllocationLogits AllocationLogits::random_init(FeasibilityClass cls, int num_bidders,
                                               int num_items, int slots, std::uint64_t seed) {
    if (num_bidders <= 0 || num_items <= 0 || slots < 1)
        throw ConfigError("allocation logits require positive dimensions and slots >= 1");
    AllocationLogits out;
    out.feasibility = cls;
    out.num_bidders = num_bidders;
    out.num_items = num_items;
    out.slots = slots;
    Rng rng(derive_seed(seed, stream::kInit));
    std::normal_distribution<double> gauss(0.0, 1.0);
    if (cls == FeasibilityClass::Additive) {
        out.additive.reserve(slots);
        for (int k = 0; k < slots; ++k) {
            Matrix L(num_bidders + 1, num_items);
            for (double& x : L.data) x = gauss(rng);
            out.additive.push_back(std::move(L));
        }
    } else {
        out.row_logits.reserve(slots);
        out.col_logits.reserve(slots);
        for (int k = 0; k < slots; ++k) {
            Matrix R(num_bidders, num_items + 1);
            Matrix C(num_bidders + 1, num_items);
            for (double& x : R.data) x = gauss(rng);
            for (double& x : C.data) x = gauss(rng);
            out.row_logits.push_back(std::move(R));
            out.col_logits.push_back(std::move(C));
        }
    }
    return out;
}

std::size_t AllocationLogits::param_count() const {
    std::size_t total = 0;
    for (const auto& L : additive) total += L.data.size();
    for (const auto& L : row_logits) total += L.data.size();
    for (const auto& L : col_logits) total += L.data.size();
    return total;
}

bool AllocationLogits::all_finite() const {
    for (const auto& L : additive)
        if (!L.all_finite()) return false;
    for (const auto& L : row_logits)
        if (!L.all_finite()) return false;
    for (const auto& L : col_logits)
        if (!L.all_finite()) return false;
    return true;
}

AllocationMatrix materialize_additive(const Matrix& logits) {
    require_finite(logits);
    const int m = logits.rows - 1;  // last row is the dummy slot
    const int n = logits.cols;
    AllocationMatrix a(m, n);
    for (int j = 0; j < n; ++j) {
        double hi = logits(0, j);
        for (int i = 1; i <= m; ++i) hi = std::max(hi, logits(i, j));
        double denom = 0.0;
        for (int i = 0; i <= m; ++i) denom += std::exp(logits(i, j) - hi);
        for (int i = 0; i < m; ++i) a(i, j) = std::exp(logits(i, j) - hi) / denom;
    }
    return a;
}

void materialize_additive_backward(const Matrix& logits, const Matrix& grad_alloc,
                                   Matrix& grad_logits) {
    const int m = logits.rows - 1;
    const int n = logits.cols;
    for (int j = 0; j < n; ++j) {
        double hi = logits(0, j);
        for (int i = 1; i <= m; ++i) hi = std::max(hi, logits(i, j));
        double denom = 0.0;
        for (int i = 0; i <= m; ++i) denom += std::exp(logits(i, j) - hi);
        // softmax prob for all m+1 slots; upstream grad on the dummy is 0
        double dot = 0.0;
        for (int i = 0; i < m; ++i)
            dot += std::exp(logits(i, j) - hi) / denom * grad_alloc(i, j);
        for (int i = 0; i <= m; ++i) {
            const double p = std::exp(logits(i, j) - hi) / denom;
            const double up = i < m ? grad_alloc(i, j) : 0.0;
            grad_logits(i, j) += p * (up - dot);
        }
    }
}

AllocationMatrix materialize_unit_demand(const Matrix& row_logits, const Matrix& col_logits) {
    require_finite(row_logits);
    require_finite(col_logits);
    const int m = row_logits.rows;
    const int n = col_logits.cols;
    AllocationMatrix a(m, n);
    for (int i = 0; i < m; ++i) {
        double denom = kDenomGuard;
        for (int j = 0; j <= n; ++j) denom += softplus(row_logits(i, j));
        for (int j = 0; j < n; ++j) a(i, j) = softplus(row_logits(i, j)) / denom;
    }
    for (int j = 0; j < n; ++j) {
        double denom = kDenomGuard;
        for (int i = 0; i <= m; ++i) denom += softplus(col_logits(i, j));
        for (int i = 0; i < m; ++i) {
            const double c = softplus(col_logits(i, j)) / denom;
            if (c < a(i, j)) a(i, j) = c;
        }
    }
    return a;
}

void materialize_unit_demand_backward(const Matrix& row_logits, const Matrix& col_logits,
                                      const Matrix& grad_alloc, Matrix& grad_row,
                                      Matrix& grad_col) {
    const int m = row_logits.rows;
    const int n = col_logits.cols;

    Matrix R(m, n + 1), C(m + 1, n);
    std::vector<double> row_denom(m), col_denom(n);
    for (int i = 0; i < m; ++i) {
        double denom = kDenomGuard;
        for (int j = 0; j <= n; ++j) denom += softplus(row_logits(i, j));
        row_denom[i] = denom;
        for (int j = 0; j <= n; ++j) R(i, j) = softplus(row_logits(i, j)) / denom;
    }
    for (int j = 0; j < n; ++j) {
        double denom = kDenomGuard;
        for (int i = 0; i <= m; ++i) denom += softplus(col_logits(i, j));
        col_denom[j] = denom;
        for (int i = 0; i <= m; ++i) C(i, j) = softplus(col_logits(i, j)) / denom;
    }

    // Route each entry's gradient to the smaller side of the min (ties -> row).
    Matrix uR(m, n + 1), uC(m + 1, n);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) {
            if (R(i, j) <= C(i, j))
                uR(i, j) = grad_alloc(i, j);
            else
                uC(i, j) = grad_alloc(i, j);
        }
    }

    // Through the normalizations: for x_j = s_j / D with D = guard + sum s,
    // dL/ds_j = (u_j - sum_l u_l x_l) / D, then ds/dlogit = sigmoid(logit).
    for (int i = 0; i < m; ++i) {
        double dot = 0.0;
        for (int j = 0; j <= n; ++j) dot += uR(i, j) * R(i, j);
        for (int j = 0; j <= n; ++j) {
            const double ds = (uR(i, j) - dot) / row_denom[i];
            const double sig = 1.0 / (1.0 + std::exp(-row_logits(i, j)));
            grad_row(i, j) += ds * sig;
        }
    }
    for (int j = 0; j < n; ++j) {
        double dot = 0.0;
        for (int i = 0; i <= m; ++i) dot += uC(i, j) * C(i, j);
        for (int i = 0; i <= m; ++i) {
            const double ds = (uC(i, j) - dot) / col_denom[j];
            const double sig = 1.0 / (1.0 + std::exp(-col_logits(i, j)));
            grad_col(i, j) += ds * sig;
        }
    }
}

std::vector<AllocationMatrix> materialize_menu(const AllocationLogits& logits) {
    std::vector<AllocationMatrix> menu;
    menu.reserve(static_cast<std::size_t>(logits.slots) + 1);
    menu.emplace_back(logits.num_bidders, logits.num_items);  // null outcome
    if (logits.feasibility == FeasibilityClass::Additive) {
        for (const auto& L : logits.additive) menu.push_back(materialize_additive(L));
    } else {
        for (int k = 0; k < logits.slots; ++k)
            menu.push_back(materialize_unit_demand(logits.row_logits[k], logits.col_logits[k]));
    }
    return menu;
}

}  // namespace lotama
