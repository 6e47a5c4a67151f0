#include "dpomdp/chain.hpp"

#include <Eigen/LU>

#include <algorithm>

namespace dpomdp {

namespace {

constexpr double kMinRcond = 1e-13;

/// Iterative Tarjan over the positive entries of P; components come out in reverse topological order.
std::vector<std::vector<Index>> strongly_connected(const Matrix& P) {
    const Index n = P.rows();
    std::vector<Index> index(n, -1), low(n, 0), stack;
    std::vector<bool> on_stack(n, false);
    std::vector<std::vector<Index>> components;
    Index counter = 0;

    struct Frame {
        Index v;
        Index next;
    };
    for (Index root = 0; root < n; ++root) {
        if (index[root] >= 0) continue;
        std::vector<Frame> frames{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.next < n) {
                const Index w = f.next++;
                if (P(f.v, w) <= 0.0) continue;
                if (index[w] < 0) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], index[w]);
                }
                continue;
            }
            const Index v = f.v;
            frames.pop_back();
            if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            if (low[v] != index[v]) continue;
            std::vector<Index> comp;
            Index w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            components.push_back(std::move(comp));
        }
    }
    return components;
}

Vector checked_solve(const Matrix& A, const Vector& b, const char* what) {
    Eigen::PartialPivLU<Matrix> lu(A);
    if (!(lu.rcond() > kMinRcond)) throw SingularSystemError(std::string("singular system in ") + what);
    return lu.solve(b);
}

Matrix checked_solve(const Matrix& A, const Matrix& B, const char* what) {
    Eigen::PartialPivLU<Matrix> lu(A);
    if (!(lu.rcond() > kMinRcond)) throw SingularSystemError(std::string("singular system in ") + what);
    return lu.solve(B);
}

}  // namespace

ChainDecomposition chain_decompose(const Matrix& P) {
    const Index n = P.rows();
    if (P.cols() != n) throw ValidationError("transition matrix must be square");
    for (Index s = 0; s < n; ++s)
        if (!is_probability_vector(P.row(s).transpose(), tol::modified_row))
            throw ValidationError("row " + std::to_string(s) + " is not a probability vector");

    ChainDecomposition out;
    out.class_of.assign(n, -1);
    std::vector<Index> component_of(n, -1);
    const auto components = strongly_connected(P);
    for (Index c = 0; c < static_cast<Index>(components.size()); ++c)
        for (Index s : components[c]) component_of[s] = c;

    for (Index c = 0; c < static_cast<Index>(components.size()); ++c) {
        bool closed = true;
        for (Index s : components[c])
            for (Index t = 0; t < n && closed; ++t)
                if (P(s, t) > 0.0 && component_of[t] != c) closed = false;
        if (closed) out.classes.push_back(components[c]);
    }
    std::sort(out.classes.begin(), out.classes.end());
    for (Index k = 0; k < static_cast<Index>(out.classes.size()); ++k)
        for (Index s : out.classes[k]) out.class_of[s] = k;
    for (Index s = 0; s < n; ++s)
        if (out.class_of[s] < 0) out.transient.push_back(s);

    out.stationary = Matrix::Zero(n, n);
    for (const auto& cls : out.classes) {
        const Index m = static_cast<Index>(cls.size());
        // pi (I - P_cc) = 0 with the last equation replaced by sum(pi) = 1.
        Matrix A(m, m);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) A(j, i) = (i == j ? 1.0 : 0.0) - P(cls[i], cls[j]);
        A.row(m - 1).setOnes();
        Vector b = Vector::Zero(m);
        b(m - 1) = 1.0;
        Vector pi = checked_solve(A, b, "stationary distribution").cwiseMax(0.0);
        pi /= pi.sum();
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < m; ++j) out.stationary(cls[i], cls[j]) = pi(j);
    }

    const Index t = static_cast<Index>(out.transient.size());
    if (t > 0 && !out.classes.empty()) {
        Matrix A = Matrix::Identity(t, t);
        for (Index i = 0; i < t; ++i)
            for (Index j = 0; j < t; ++j) A(i, j) -= P(out.transient[i], out.transient[j]);
        const Index k = static_cast<Index>(out.classes.size());
        Matrix R = Matrix::Zero(t, k);
        for (Index i = 0; i < t; ++i)
            for (Index s = 0; s < n; ++s)
                if (out.class_of[s] >= 0) R(i, out.class_of[s]) += P(out.transient[i], s);
        Matrix absorb = checked_solve(A, R, "absorption probabilities").cwiseMax(0.0);
        // Every transient state is absorbed with probability one.
        for (Index i = 0; i < t; ++i) absorb.row(i) /= absorb.row(i).sum();
        for (Index i = 0; i < t; ++i)
            for (Index c = 0; c < k; ++c) {
                const Index rep = out.classes[c].front();
                out.stationary.row(out.transient[i]) += absorb(i, c) * out.stationary.row(rep);
            }
    }
    return out;
}

}  // namespace dpomdp
