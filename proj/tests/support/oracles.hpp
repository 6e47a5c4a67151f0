#pragma once

// Independent reference computations used by the tests. Nothing here calls the
// library routine it is used to check; only the plain data types are shared.

#include "dpomdp/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using dpomdp::Index;
using dpomdp::Matrix;
using dpomdp::PomdpModel;
using dpomdp::Vector;

/// p(z|x,u) by explicit double sums.
inline Vector observation_probability(const PomdpModel& m, const Vector& x, Index u) {
    Vector out = Vector::Zero(m.num_observations);
    for (Index z = 0; z < m.num_observations; ++z)
        for (Index s = 0; s < m.num_states; ++s)
            for (Index t = 0; t < m.num_states; ++t)
                out(z) += x(s) * m.transition[u](s, t) * m.observation[u](t, z);
    return out;
}

/// Bayes posterior by explicit sums.
inline Vector posterior(const PomdpModel& m, const Vector& x, Index u, Index z) {
    Vector joint = Vector::Zero(m.num_states);
    for (Index t = 0; t < m.num_states; ++t)
        for (Index s = 0; s < m.num_states; ++s) joint(t) += x(s) * m.transition[u](s, t) * m.observation[u](t, z);
    double total = 0.0;
    for (Index t = 0; t < m.num_states; ++t) total += joint(t);
    return joint / total;
}

inline double stage_cost(const PomdpModel& m, const Vector& x, Index u) {
    double c = 0.0;
    for (Index s = 0; s < m.num_states; ++s) c += x(s) * m.cost(s, u);
    return c;
}

/// Exact N-stage cost by recursion over the belief tree, zero terminal cost.
inline double belief_tree_value(const PomdpModel& m, const Vector& x, int stages, double alpha) {
    if (stages == 0) return 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (Index u = 0; u < m.num_actions; ++u) {
        double q = stage_cost(m, x, u);
        const Vector pz = observation_probability(m, x, u);
        for (Index z = 0; z < m.num_observations; ++z)
            if (pz(z) > 1e-12) q += alpha * pz(z) * belief_tree_value(m, posterior(m, x, u, z), stages - 1, alpha);
        best = std::min(best, q);
    }
    return best;
}

/// Optimal discounted values of a finite MDP by enumerating every stationary
/// deterministic policy and taking the pointwise minimum of the exact solves.
inline Vector discounted_by_enumeration(const std::vector<Matrix>& P, const Matrix& cost, double alpha) {
    const Index n = cost.rows(), A = cost.cols();
    Vector best = Vector::Constant(n, std::numeric_limits<double>::infinity());
    std::vector<Index> policy(n, 0);
    for (;;) {
        Matrix Pp(n, n);
        Vector g(n);
        for (Index s = 0; s < n; ++s) {
            Pp.row(s) = P[policy[s]].row(s);
            g(s) = cost(s, policy[s]);
        }
        const Vector v = (Matrix::Identity(n, n) - alpha * Pp).fullPivLu().solve(g);
        best = best.cwiseMin(v);
        Index k = 0;
        while (k < n && ++policy[k] == A) policy[k++] = 0;
        if (k == n) break;
    }
    return best;
}

/// Limiting average of matrix powers, (1/N) sum_{t<N} P^t with N = 2^doublings,
/// accumulated by repeated doubling.
inline Matrix cesaro_limit(const Matrix& P, int doublings) {
    const Index n = P.rows();
    Matrix sum = Matrix::Identity(n, n);  // sum of the first N powers
    Matrix power = P;                     // P^N
    for (int k = 0; k < doublings; ++k) {
        sum = sum + power * sum;
        power = power * power;
    }
    return sum / std::ldexp(1.0, doublings);
}

/// Optimal average cost of a unichain MDP by relative value iteration on the
/// aperiodic transform 0.5 I + 0.5 P.
inline double relative_value_iteration(const std::vector<Matrix>& P, const Matrix& cost, int sweeps = 200000,
                                       double tol = 1e-13) {
    const Index n = cost.rows(), A = cost.cols();
    Vector h = Vector::Zero(n);
    double gain = 0.0;
    for (int it = 0; it < sweeps; ++it) {
        Vector next(n);
        for (Index s = 0; s < n; ++s) {
            double best = std::numeric_limits<double>::infinity();
            for (Index u = 0; u < A; ++u) best = std::min(best, cost(s, u) + 0.5 * h(s) + 0.5 * P[u].row(s).dot(h));
            next(s) = best;
        }
        const double g = next(0);
        next.array() -= g;
        const double change = (next - h).cwiseAbs().maxCoeff();
        h = next;
        gain = g;
        if (change < tol) break;
    }
    return gain;
}

/// Minimum of sum_i w_i ||x - x_i||_1 over representations x = sum_i w_i x_i,
/// found by enumerating every set of S grid points as a candidate basis.
inline double best_interpolation_objective(const std::vector<Vector>& grid, const Vector& x) {
    const Index S = x.size(), n = static_cast<Index>(grid.size());
    double best = std::numeric_limits<double>::infinity();
    std::vector<Index> pick(S);
    for (Index i = 0; i < S; ++i) pick[i] = i;
    for (;;) {
        Matrix B(S, S);
        for (Index j = 0; j < S; ++j) B.col(j) = grid[pick[j]];
        Eigen::FullPivLU<Matrix> lu(B);
        if (lu.isInvertible()) {
            const Vector w = lu.solve(x);
            if ((B * w - x).cwiseAbs().maxCoeff() < 1e-10 && w.minCoeff() >= -1e-12) {
                double obj = 0.0;
                for (Index j = 0; j < S; ++j) obj += w(j) * (x - grid[pick[j]]).cwiseAbs().sum();
                best = std::min(best, obj);
            }
        }
        Index k = S - 1;
        while (k >= 0 && pick[k] == n - S + k) --k;
        if (k < 0) break;
        ++pick[k];
        for (Index j = k + 1; j < S; ++j) pick[j] = pick[j - 1] + 1;
    }
    return best;
}

/// Two-state interpolation: weights on the nearest grid points left and right of p = x(0).
inline std::vector<std::pair<double, double>> bracket_weights(const std::vector<double>& first_coords, double p) {
    std::vector<double> sorted = first_coords;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        const double lo = sorted[i], hi = sorted[i + 1];
        if (p >= lo - 1e-15 && p <= hi + 1e-15) {
            if (std::abs(p - lo) < 1e-12) return {{lo, 1.0}};
            if (std::abs(p - hi) < 1e-12) return {{hi, 1.0}};
            const double t = (p - lo) / (hi - lo);
            return {{lo, 1.0 - t}, {hi, t}};
        }
    }
    return {};
}

/// Evenly spaced two-state beliefs (p, 1 - p), endpoints included.
inline std::vector<Vector> two_state_mesh(int points) {
    std::vector<Vector> out;
    for (int i = 0; i < points; ++i) {
        const double p = static_cast<double>(i) / (points - 1);
        Vector x(2);
        x << p, 1.0 - p;
        out.push_back(x);
    }
    return out;
}

/// Random POMDP with strictly positive tables and costs in [0, 1).
inline PomdpModel random_pomdp(Index S, Index A, Index Z, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.05, 1.0);
    PomdpModel m;
    m.num_states = S;
    m.num_actions = A;
    m.num_observations = Z;
    m.cost = Matrix(S, A);
    for (Index u = 0; u < A; ++u) {
        Matrix T(S, S), O(S, Z);
        for (Index s = 0; s < S; ++s) {
            for (Index t = 0; t < S; ++t) T(s, t) = unit(rng);
            for (Index z = 0; z < Z; ++z) O(s, z) = unit(rng);
            T.row(s) /= T.row(s).sum();
            O.row(s) /= O.row(s).sum();
            m.cost(s, u) = unit(rng) - 0.05;
        }
        m.transition.push_back(T);
        m.observation.push_back(O);
    }
    m.discount = 0.9;
    return m;
}

}  // namespace oracle
