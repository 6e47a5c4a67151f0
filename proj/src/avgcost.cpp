#include "dpomdp/avgcost.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <sstream>

namespace dpomdp {

namespace {

constexpr long kMaxIterations = 10'000;
constexpr double kMinRcond = 1e-13;

double level_scale(const Vector& v) { return std::max(1.0, v.size() ? v.cwiseAbs().maxCoeff() : 0.0); }

std::vector<double> level_scales(const SensitiveEvaluation& eval, int n) {
    std::vector<double> out;
    for (int k = -1; k <= n + 1; ++k) out.push_back(level_scale(eval.level(k)));
    return out;
}

/// Per-level action values at support state s.
std::vector<Vector> state_q(const FiniteMdp& mdp, const SensitiveEvaluation& eval, int n, Index s) {
    const Index A = mdp.num_actions();
    std::vector<Vector> q(n + 3, Vector(A));
    for (Index u = 0; u < A; ++u) {
        const auto row = mdp.transition[u].row(s);
        q[0](u) = row.dot(eval.gain);
        q[1](u) = mdp.cost(s, u) + row.dot(eval.bias);
        for (int k = 1; k <= n + 1; ++k) q[k + 1](u) = row.dot(eval.w[k - 1]);
    }
    return q;
}

std::string format_policy(const std::vector<int>& policy) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < policy.size(); ++i) os << (i ? "," : "") << policy[i];
    os << ']';
    return os.str();
}

}  // namespace

SensitiveEvaluation policy_evaluation_sensitive(const FiniteMdp& mdp, const std::vector<int>& policy, int n) {
    if (n < -1) throw ValidationError("discount-optimality order must be at least -1");
    if (static_cast<Index>(policy.size()) != mdp.num_states()) throw ValidationError("policy size mismatch");
    for (int u : policy)
        if (u < 0 || u >= mdp.num_actions()) throw ValidationError("policy action out of range");

    const Matrix P = mdp.policy_matrix(policy);
    const Vector g = mdp.policy_cost(policy);
    const Index N = P.rows();

    SensitiveEvaluation out;
    out.chains = chain_decompose(P);
    const Matrix& Pstar = out.chains.stationary;
    Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(N, N) - P + Pstar);
    if (!(lu.rcond() > kMinRcond)) throw SingularSystemError("fundamental matrix is numerically singular");
    const Matrix H = lu.solve(Matrix::Identity(N, N)) - Pstar;

    out.gain = Pstar * g;
    out.bias = H * g;
    Vector prev = out.bias;
    for (int k = 1; k <= n + 1; ++k) {
        prev = -(H * prev);
        out.w.push_back(prev);
    }
    return out;
}

std::vector<int> nested_argmin(const std::vector<Vector>& q, const std::vector<double>& scale) {
    std::vector<int> candidates(q.front().size());
    for (std::size_t u = 0; u < candidates.size(); ++u) candidates[u] = static_cast<int>(u);
    for (std::size_t l = 0; l < q.size(); ++l) {
        double best = std::numeric_limits<double>::infinity();
        for (int u : candidates) best = std::min(best, q[l](u));
        const double slack = tol::argmin * scale[l];
        std::erase_if(candidates, [&](int u) { return q[l](u) > best + slack; });
    }
    return candidates;
}

ImprovementStep policy_improvement_sensitive(const FiniteMdp& mdp, const SensitiveEvaluation& eval,
                                             const std::vector<int>& policy, int n) {
    ImprovementStep out{policy, false};
    const auto scale = level_scales(eval, n);
    for (Index s = 0; s < mdp.num_states(); ++s) {
        const auto best = nested_argmin(state_q(mdp, eval, n, s), scale);
        if (std::find(best.begin(), best.end(), policy[s]) != best.end()) continue;
        out.policy[s] = best.front();
        out.improved = true;
    }
    return out;
}

std::vector<double> optimality_residuals(const FiniteMdp& mdp, const SensitiveEvaluation& eval, int n,
                                         const std::vector<int>& policy, bool* policy_in_argmin) {
    std::vector<double> res(n + 3, 0.0);
    const auto scale = level_scales(eval, n);
    bool inside = true;
    for (Index s = 0; s < mdp.num_states(); ++s) {
        const auto q = state_q(mdp, eval, n, s);
        // lhs of level l - 1: J, J + h, w_{k-1} + w_k.
        std::vector<int> candidates(mdp.num_actions());
        for (Index u = 0; u < mdp.num_actions(); ++u) candidates[u] = static_cast<int>(u);
        for (int l = 0; l < n + 3; ++l) {
            const int k = l - 1;
            const double lhs = k == -1 ? eval.gain(s) : eval.level(k - 1)(s) + eval.level(k)(s);
            double best = std::numeric_limits<double>::infinity();
            for (int u : candidates) best = std::min(best, q[l](u));
            res[l] = std::max(res[l], std::abs(lhs - best));
            const double slack = tol::argmin * scale[l];
            std::erase_if(candidates, [&](int u) { return q[l](u) > best + slack; });
        }
        if (std::find(candidates.begin(), candidates.end(), policy[s]) == candidates.end()) inside = false;
    }
    if (policy_in_argmin) *policy_in_argmin = inside;
    return res;
}

double SensitiveSolution::max_residual() const {
    return residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
}

SensitiveSolution solve_multichain(const FiniteMdp& mdp, int n) {
    if (n < -1) throw ValidationError("discount-optimality order must be at least -1");
    std::vector<int> policy(mdp.num_states());
    for (Index s = 0; s < mdp.num_states(); ++s)
        policy[s] = argmin_set(Vector(mdp.cost.row(s).transpose())).front();

    SensitiveSolution out;
    out.order = n;
    std::vector<int> previous;
    for (;;) {
        if (out.iterations >= kMaxIterations)
            throw ConvergenceError("multichain policy iteration exceeded 10^4 iterations; last policies " +
                                   format_policy(previous) + " and " + format_policy(policy));
        ++out.iterations;
        SensitiveEvaluation eval = policy_evaluation_sensitive(mdp, policy, n);
        auto step = policy_improvement_sensitive(mdp, eval, policy, n);
        if (!step.improved) {
            out.residuals = optimality_residuals(mdp, eval, n, policy, &out.policy_in_argmin);
            out.gain = std::move(eval.gain);
            out.bias = std::move(eval.bias);
            out.w = std::move(eval.w);
            out.chains = std::move(eval.chains);
            out.policy = std::move(policy);
            return out;
        }
        previous = std::move(policy);
        policy = std::move(step.policy);
    }
}

AverageExtension extend_average_solution(const PomdpModel& model, const ModifiedMdp& mdp,
                                         const SensitiveSolution& sol, const Belief& x) {
    const int n = sol.order;
    const Index A = model.num_actions;
    const auto rows = transition_rows(model, mdp, x);
    std::vector<Vector> q(n + 3, Vector(A));
    Vector stage(A);
    for (Index u = 0; u < A; ++u) {
        stage(u) = stage_cost(model, x, u);
        q[0](u) = rows[u].dot(sol.gain);
        q[1](u) = stage(u) + rows[u].dot(sol.bias);
        for (int k = 1; k <= n + 1; ++k) q[k + 1](u) = rows[u].dot(sol.w[k - 1]);
    }
    std::vector<double> scale{level_scale(sol.gain), level_scale(sol.bias)};
    for (const auto& wk : sol.w) scale.push_back(level_scale(wk));

    AverageExtension out;
    out.actions = nested_argmin(q, scale);
    const int u = out.action();
    out.gain = q[0](u);
    out.bias = q[1](u) - out.gain;
    return out;
}

}  // namespace dpomdp
