#pragma once

#include <cstdint>
#include <vector>

#include "lotama/matrix.hpp"
#include "lotama/mechanism.hpp"

namespace lotama {

// Unconstrained learnable parameters that materialize into always-feasible
// allocation matrices.
//
// Additive class: one (m+1) x n tensor per menu slot. Each item column gets a
// softmax over the m bidders plus a dummy "withhold" slot (row m); the dummy
// is dropped, so column sums over bidders are <= 1 by construction.
//
// Unit-demand class: per slot, row-logits m x (n+1) (dummy item column n) and
// col-logits (m+1) x n (dummy bidder row m). softplus-normalize rows and
// columns to sum to 1 including their dummies, then take the entrywise min of
// the real m x n blocks; both row and column sums land <= 1.
struct AllocationLogits {
    FeasibilityClass feasibility = FeasibilityClass::Additive;
    int num_bidders = 0;
    int num_items = 0;
    int slots = 0;  // learnable slots; the null allocation is prepended later

    std::vector<Matrix> additive;    // slots x (m+1) x n
    std::vector<Matrix> row_logits;  // slots x m x (n+1)
    std::vector<Matrix> col_logits;  // slots x (m+1) x n

    static AllocationLogits random_init(FeasibilityClass cls, int num_bidders, int num_items,
                                        int slots, std::uint64_t seed);

    std::size_t param_count() const;
    bool all_finite() const;
};

AllocationMatrix materialize_additive(const Matrix& logits);
AllocationMatrix materialize_unit_demand(const Matrix& row_logits, const Matrix& col_logits);

// Materializes every slot and prepends the fixed null allocation; result has
// slots + 1 entries.
std::vector<AllocationMatrix> materialize_menu(const AllocationLogits& logits);

// Reverse-mode Jacobian products for the materializers. grad_alloc is
// d(objective)/d(allocation entries); outputs are accumulated in place.
void materialize_additive_backward(const Matrix& logits, const Matrix& grad_alloc,
                                   Matrix& grad_logits);
void materialize_unit_demand_backward(const Matrix& row_logits, const Matrix& col_logits,
                                      const Matrix& grad_alloc, Matrix& grad_row,
                                      Matrix& grad_col);

}  // namespace lotama
