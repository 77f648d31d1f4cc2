#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace lotama {

// Dense row-major matrix of doubles. Small and value-semantic; every
// allocation matrix and bid profile in the toolkit is one of these.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

    double& operator()(int i, int j) {
        assert(i >= 0 && i < rows && j >= 0 && j < cols);
        return data[static_cast<std::size_t>(i) * cols + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < rows && j >= 0 && j < cols);
        return data[static_cast<std::size_t>(i) * cols + j];
    }

    const double* row_ptr(int i) const { return data.data() + static_cast<std::size_t>(i) * cols; }
    double* row_ptr(int i) { return data.data() + static_cast<std::size_t>(i) * cols; }

    bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

    bool all_finite() const {
        for (double x : data)
            if (!std::isfinite(x)) return false;
        return true;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows == b.rows && a.cols == b.cols && a.data == b.data;
    }
};

// An allocation matrix a: a(i,j) is the fraction of item j given to bidder i.
using AllocationMatrix = Matrix;
// A bid profile v: v(i,j) is bidder i's reported value for item j.
using BidProfile = Matrix;

}  // namespace lotama
