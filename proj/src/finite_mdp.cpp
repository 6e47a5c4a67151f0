#include "dpomdp/finite_mdp.hpp"

namespace dpomdp {

void FiniteMdp::validate(double tolerance) const {
    if (static_cast<Index>(transition.size()) != num_actions())
        throw ValidationError("one transition matrix per action expected");
    for (Index u = 0; u < num_actions(); ++u) {
        const auto& P = transition[u];
        if (P.rows() != num_states() || P.cols() != num_states())
            throw ValidationError("transition matrix has wrong shape");
        for (Index s = 0; s < num_states(); ++s) {
            double total = 0.0;
            for (SparseRowMatrix::InnerIterator it(P, s); it; ++it) {
                if (it.value() < 0.0) throw ValidationError("negative transition probability");
                total += it.value();
            }
            if (std::abs(total - 1.0) > tolerance)
                throw ValidationError("row " + std::to_string(s) + " of action " + std::to_string(u) + " sums to " +
                                      std::to_string(total));
        }
    }
    if (!cost.allFinite()) throw ValidationError("non-finite cost");
}

Matrix FiniteMdp::policy_matrix(const std::vector<int>& policy) const {
    const Index n = num_states();
    Matrix P = Matrix::Zero(n, n);
    for (Index s = 0; s < n; ++s)
        for (SparseRowMatrix::InnerIterator it(transition[policy[s]], s); it; ++it) P(s, it.col()) = it.value();
    return P;
}

Vector FiniteMdp::policy_cost(const std::vector<int>& policy) const {
    Vector g(num_states());
    for (Index s = 0; s < num_states(); ++s) g(s) = cost(s, policy[s]);
    return g;
}

FiniteMdp make_finite_mdp(const std::vector<Matrix>& transition, const Matrix& cost) {
    FiniteMdp mdp;
    for (const auto& dense : transition) mdp.transition.push_back(dense.sparseView());
    mdp.cost = cost;
    mdp.validate();
    return mdp;
}

}  // namespace dpomdp
