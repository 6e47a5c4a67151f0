#pragma once

#include "dpomdp/chain.hpp"
#include "dpomdp/lower_approx.hpp"

#include <vector>

namespace dpomdp {

/// Laurent-type coefficients of a stationary policy: gain, bias and w_1..w_{n+1}.
struct SensitiveEvaluation {
    Vector gain;
    Vector bias;
    std::vector<Vector> w;
    ChainDecomposition chains;

    /// Level k in {-1, 0, 1, ...}: gain, bias, then w_k.
    const Vector& level(int k) const { return k == -1 ? gain : k == 0 ? bias : w[k - 1]; }
};

/// Canonical solution of the nested policy equations
///   gain = P gain,  gain + bias = g + P bias,  w_{k-1} + w_k = P w_k  (k = 1..n+1, w_0 = bias)
/// with P* w_k = 0 for k >= 0. Computed from the limiting matrix P* and the deviation
/// matrix H = (I - P + P*)^{-1} - P*. Throws SingularSystemError on a degenerate chain.
SensitiveEvaluation policy_evaluation_sensitive(const FiniteMdp& mdp, const std::vector<int>& policy, int n);

/// Nested argmin U_{-1} ⊇ U_0 ⊇ ... ⊇ U_{n+1} given per-level action values.
///
/// `q[l]` holds the value of every action at level l - 1; candidates within
/// 1e-9 * scale[l] of the level minimum survive.
std::vector<int> nested_argmin(const std::vector<Vector>& q, const std::vector<double>& scale);

struct ImprovementStep {
    std::vector<int> policy;
    bool improved = false;
};

/// One multichain improvement step. The incumbent action is kept whenever it
/// survives to U_{n+1}; otherwise the smallest index in U_{n+1} is chosen.
ImprovementStep policy_improvement_sensitive(const FiniteMdp& mdp, const SensitiveEvaluation& eval,
                                             const std::vector<int>& policy, int n);

struct SensitiveSolution {
    int order = 2;
    Vector gain;
    Vector bias;
    std::vector<Vector> w;  ///< w_1..w_{n+1}
    std::vector<int> policy;
    /// Sup-norm residual of each nested equation, levels -1..n+1 in order.
    std::vector<double> residuals;
    /// Whether every support state's policy action lies in its U_{n+1}.
    bool policy_in_argmin = false;
    ChainDecomposition chains;
    long iterations = 0;

    double max_residual() const;
};

/// n-discount optimal policy iteration on a finite MDP from the myopic policy.
/// Throws ConvergenceError after 10^4 iterations.
SensitiveSolution solve_multichain(const FiniteMdp& mdp, int n = 2);

inline SensitiveSolution solve_multichain(const ModifiedMdp& mdp, int n = 2) { return solve_multichain(mdp.mdp, n); }

/// Residuals of the nested optimality equations at (gain, bias, w) by direct substitution.
std::vector<double> optimality_residuals(const FiniteMdp& mdp, const SensitiveEvaluation& eval, int n,
                                         const std::vector<int>& policy, bool* policy_in_argmin = nullptr);

/// Two-stage extension of an average-cost solution to an arbitrary belief.
struct AverageExtension {
    std::vector<int> actions;  ///< U_{n+1} at x
    double gain = 0.0;
    double bias = 0.0;

    int action() const { return actions.front(); }
};

AverageExtension extend_average_solution(const PomdpModel& model, const ModifiedMdp& mdp,
                                         const SensitiveSolution& sol, const Belief& x);

}  // namespace dpomdp
