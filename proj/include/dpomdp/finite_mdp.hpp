#pragma once

#include "dpomdp/types.hpp"

#include <vector>

namespace dpomdp {

/// Finite-state MDP with per-action sparse transition matrices and costs(s, u).
struct FiniteMdp {
    std::vector<SparseRowMatrix> transition;
    Matrix cost;

    Index num_states() const noexcept { return cost.rows(); }
    Index num_actions() const noexcept { return cost.cols(); }

    /// Throws ValidationError when a row is not a probability vector within `tolerance`.
    void validate(double tolerance = tol::modified_row) const;

    /// Dense transition matrix of a stationary deterministic policy.
    Matrix policy_matrix(const std::vector<int>& policy) const;
    Vector policy_cost(const std::vector<int>& policy) const;
};

/// Builds a FiniteMdp from dense per-action tables.
FiniteMdp make_finite_mdp(const std::vector<Matrix>& transition, const Matrix& cost);

}  // namespace dpomdp
