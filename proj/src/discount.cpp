#include "dpomdp/discount.hpp"

#include <algorithm>
#include <cmath>

namespace dpomdp {

namespace {

constexpr long kMaxSweeps = 1'000'000;

Matrix q_values(const FiniteMdp& mdp, const Vector& values, double alpha) {
    Matrix q = mdp.cost;
    if (alpha != 0.0)
        for (Index u = 0; u < mdp.num_actions(); ++u) q.col(u) += alpha * (mdp.transition[u] * values);
    return q;
}

}  // namespace

DiscountSolution value_iteration(const FiniteMdp& mdp, double alpha, double tol) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw ValidationError("discount factor must lie in [0, 1)");
    if (!(tol > 0.0)) throw ValidationError("tolerance must be positive");
    DiscountSolution out;
    out.alpha = alpha;
    out.tolerance = tol;
    const Index n = mdp.num_states();
    const double stop = alpha == 0.0 ? std::numeric_limits<double>::infinity() : tol * (1.0 - alpha) / (2.0 * alpha);

    Vector values = Vector::Zero(n);
    for (;;) {
        if (out.iterations >= kMaxSweeps)
            throw ConvergenceError("value iteration did not converge in 10^6 sweeps (residual " +
                                   std::to_string(out.residual) + ")");
        Vector next = q_values(mdp, values, alpha).rowwise().minCoeff();
        out.residual = n == 0 ? 0.0 : (next - values).cwiseAbs().maxCoeff();
        values = std::move(next);
        ++out.iterations;
        if (out.residual <= stop) break;
    }

    const Matrix q = q_values(mdp, values, alpha);
    out.greedy_policy.resize(n);
    for (Index s = 0; s < n; ++s) out.greedy_policy[s] = argmin_set(Vector(q.row(s).transpose())).front();
    out.values = std::move(values);
    return out;
}

DiscountErrorBounds discounted_error_bounds(const PomdpModel& model, const ModifiedMdp& mdp,
                                            const DiscountSolution& sol, const std::vector<Belief>& beliefs) {
    const ValueOracle extension = [&](const Belief& y) {
        return evaluate_extension(model, mdp, sol.values, y, sol.alpha).value;
    };
    DiscountErrorBounds out;
    out.max_residual = -std::numeric_limits<double>::infinity();
    out.min_residual = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const auto& x : beliefs) {
        const double r = exact_backup(model, x, extension, sol.alpha).value - extension(x);
        out.max_residual = std::max(out.max_residual, r);
        out.min_residual = std::min(out.min_residual, r);
        worst = std::max(worst, std::abs(r));
    }
    out.samples = static_cast<Index>(beliefs.size());
    out.gap_bound = worst / (1.0 - sol.alpha);
    return out;
}

DiscountErrorBounds discounted_error_bounds(const PomdpModel& model, const ModifiedMdp& mdp,
                                            const DiscountSolution& sol, Index samples, std::uint64_t seed) {
    std::vector<Belief> beliefs;
    Rng rng = make_stream(seed, "discount-bounds", 0);
    for (Index m = 0; m < samples; ++m) beliefs.push_back(sample_uniform_belief(model.num_states, rng));
    beliefs.insert(beliefs.end(), mdp.support.begin(), mdp.support.end());
    auto out = discounted_error_bounds(model, mdp, sol, beliefs);
    out.seed = seed;
    return out;
}

int lookahead_action(const PomdpModel& model, const ModifiedMdp& mdp, const DiscountSolution& sol, const Belief& x) {
    const ValueOracle extension = [&](const Belief& y) {
        return evaluate_extension(model, mdp, sol.values, y, sol.alpha).value;
    };
    return exact_backup(model, x, extension, sol.alpha).action();
}

int greedy_modified_action(const PomdpModel& model, const ModifiedMdp& mdp, const DiscountSolution& sol,
                           const Belief& x) {
    return evaluate_extension(model, mdp, sol.values, x, sol.alpha).action();
}

}  // namespace dpomdp
