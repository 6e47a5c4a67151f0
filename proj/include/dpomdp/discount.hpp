#pragma once

#include "dpomdp/lower_approx.hpp"

#include <cstdint>
#include <vector>

namespace dpomdp {

struct DiscountSolution {
    Vector values;  ///< on the support set C
    double alpha = 0.0;
    double residual = 0.0;  ///< last sup-norm difference between iterates
    double tolerance = 0.0;
    std::vector<int> greedy_policy;
    long iterations = 0;
};

/// Jacobi value iteration J <- min_u [g_u + alpha P_u J] from J = 0.
///
/// Stops once the successive difference is at most tol (1 - alpha) / (2 alpha),
/// which puts the iterate within tol / 2 of the fixed point. Throws
/// ConvergenceError after 10^6 sweeps.
DiscountSolution value_iteration(const FiniteMdp& mdp, double alpha, double tol);

inline DiscountSolution value_iteration(const ModifiedMdp& mdp, double alpha, double tol) {
    return value_iteration(mdp.mdp, alpha, tol);
}

/// Sampled residual statistics of r(x) = (T J)(x) - J(x) with J the extension of a discounted solution.
struct DiscountErrorBounds {
    double max_residual = 0.0;
    double min_residual = 0.0;
    /// max |r| / (1 - alpha); a sampled under-estimate of the exact bound on ||J - J*||.
    double gap_bound = 0.0;
    Index samples = 0;
    std::uint64_t seed = 0;
};

DiscountErrorBounds discounted_error_bounds(const PomdpModel& model, const ModifiedMdp& mdp,
                                            const DiscountSolution& sol, Index samples, std::uint64_t seed);

/// Same statistics over caller-supplied beliefs (support beliefs are not added).
DiscountErrorBounds discounted_error_bounds(const PomdpModel& model, const ModifiedMdp& mdp,
                                            const DiscountSolution& sol, const std::vector<Belief>& beliefs);

/// Exact one-step lookahead with the extension of `sol` as continuation cost.
int lookahead_action(const PomdpModel& model, const ModifiedMdp& mdp, const DiscountSolution& sol, const Belief& x);

/// Minimizer of the modified backup at x.
int greedy_modified_action(const PomdpModel& model, const ModifiedMdp& mdp, const DiscountSolution& sol,
                           const Belief& x);

}  // namespace dpomdp
