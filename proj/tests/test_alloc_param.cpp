#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lotama/alloc_param.hpp"
#include "lotama/errors.hpp"
#include "lotama/rng.hpp"

using namespace lotama;

namespace {

Matrix filled(int r, int c, double v) { return Matrix(r, c, v); }

Matrix random_logits(int r, int c, Rng& rng, double sd = 2.0) {
    std::normal_distribution<double> gauss(0.0, sd);
    Matrix L(r, c);
    for (double& x : L.data) x = gauss(rng);
    return L;
}

}  // namespace

TEST_CASE("materialize_additive uniform softmax at zero logits") {
    // m=2: each item column splits 1/3, 1/3 with 1/3 on the dummy
    auto a = materialize_additive(filled(3, 2, 0.0));
    REQUIRE(a.rows == 2);
    REQUIRE(a.cols == 2);
    for (double x : a.data) CHECK(x == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("materialize_additive saturates with a dominant logit") {
    Matrix L(3, 2, 0.0);
    L(0, 1) = 50.0;
    auto a = materialize_additive(L);
    CHECK(a(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a(1, 1) <= 1e-9);
    CHECK(a(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("materialize_additive column sums stay in [0,1] over random draws") {
    Rng rng(5);
    for (int trial = 0; trial < 10000; ++trial) {
        auto a = materialize_additive(random_logits(4, 3, rng));
        CHECK(allocation_is_feasible(a, FeasibilityClass::Additive));
        for (int j = 0; j < a.cols; ++j) {
            double col = 0.0;
            for (int i = 0; i < a.rows; ++i) col += a(i, j);
            CHECK(col >= 0.0);
            CHECK(col <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("materialize_additive monotone in its own logit") {
    Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        auto L = random_logits(3, 2, rng);
        auto base = materialize_additive(L);
        L(1, 0) += 0.25;
        auto bumped = materialize_additive(L);
        CHECK(bumped(1, 0) > base(1, 0));
    }
}

TEST_CASE("materialize_additive rejects non-finite logits") {
    Matrix L(3, 2, 0.0);
    L(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(materialize_additive(L), NumericalError);
}

TEST_CASE("materialize_unit_demand hand example with equal logits") {
    // m=2, n=4: rows normalize over 5 slots -> 1/5, columns over 3 -> 1/3;
    // min is 1/5 everywhere, row sums 0.8, column sums 0.4
    auto a = materialize_unit_demand(filled(2, 5, 1.0), filled(3, 4, 1.0));
    REQUIRE(a.rows == 2);
    REQUIRE(a.cols == 4);
    for (double x : a.data) CHECK(x == doctest::Approx(0.2).epsilon(1e-9));
    for (int i = 0; i < 2; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += a(i, j);
        CHECK(row == doctest::Approx(0.8).epsilon(1e-9));
    }
    for (int j = 0; j < 4; ++j) CHECK(a(0, j) + a(1, j) == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("materialize_unit_demand all-dummy rows give the zero allocation") {
    Matrix R(2, 5, -40.0);
    R(0, 4) = 40.0;  // all row mass on the dummy item column
    R(1, 4) = 40.0;
    auto a = materialize_unit_demand(R, filled(3, 4, 1.0));
    for (double x : a.data) CHECK(x <= 1e-12);
}

TEST_CASE("materialize_unit_demand feasibility over random draws") {
    Rng rng(13);
    for (int trial = 0; trial < 10000; ++trial) {
        auto a = materialize_unit_demand(random_logits(2, 5, rng), random_logits(3, 4, rng));
        CHECK(allocation_is_feasible(a, FeasibilityClass::UnitDemand));
    }
}

TEST_CASE("materialize_menu prepends the null outcome and stays feasible") {
    auto logits = AllocationLogits::random_init(FeasibilityClass::Additive, 2, 2, 1, 3);
    auto menu = materialize_menu(logits);
    REQUIRE(menu.size() == 2);
    for (double x : menu[0].data) CHECK(x == 0.0);

    auto big = AllocationLogits::random_init(FeasibilityClass::UnitDemand, 2, 4, 2048, 17);
    auto big_menu = materialize_menu(big);
    CHECK(big_menu.size() == 2049);
    for (const auto& a : big_menu) CHECK(allocation_is_feasible(a, FeasibilityClass::UnitDemand));
}

TEST_CASE("additive backward matches finite differences") {
    Rng rng(21);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto L = random_logits(3, 2, rng, 1.0);
    Matrix up(2, 2);
    for (double& x : up.data) x = uni(rng);

    auto objective = [&](const Matrix& logits) {
        auto a = materialize_additive(logits);
        double acc = 0.0;
        for (std::size_t idx = 0; idx < a.data.size(); ++idx) acc += a.data[idx] * up.data[idx];
        return acc;
    };

    Matrix grad(3, 2);
    materialize_additive_backward(L, up, grad);
    const double h = 1e-6;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) {
            auto plus = L, minus = L;
            plus(i, j) += h;
            minus(i, j) -= h;
            const double fd = (objective(plus) - objective(minus)) / (2 * h);
            CHECK(grad(i, j) == doctest::Approx(fd).epsilon(1e-5));
        }
    }
}

TEST_CASE("unit-demand backward matches finite differences") {
    Rng rng(27);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    auto R = random_logits(2, 4, rng, 1.0);
    auto C = random_logits(3, 3, rng, 1.0);
    Matrix up(2, 3);
    for (double& x : up.data) x = uni(rng);

    auto objective = [&](const Matrix& row, const Matrix& col) {
        auto a = materialize_unit_demand(row, col);
        double acc = 0.0;
        for (std::size_t idx = 0; idx < a.data.size(); ++idx) acc += a.data[idx] * up.data[idx];
        return acc;
    };

    Matrix grad_row(2, 4), grad_col(3, 3);
    materialize_unit_demand_backward(R, C, up, grad_row, grad_col);
    const double h = 1e-6;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 4; ++j) {
            auto plus = R, minus = R;
            plus(i, j) += h;
            minus(i, j) -= h;
            const double fd = (objective(plus, C) - objective(minus, C)) / (2 * h);
            CHECK(grad_row(i, j) == doctest::Approx(fd).epsilon(2e-5));
        }
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            auto plus = C, minus = C;
            plus(i, j) += h;
            minus(i, j) -= h;
            const double fd = (objective(R, plus) - objective(R, minus)) / (2 * h);
            CHECK(grad_col(i, j) == doctest::Approx(fd).epsilon(2e-5));
        }
}
