#include "dpomdp/simplex.hpp"

#include <limits>

namespace dpomdp {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

/// Tableau rows 0..m-1 hold [B^-1 A | B^-1 b]; `basis[r]` is the basic column of row r.
struct Tableau {
    Matrix t;
    std::vector<Index> basis;
    Index n;  // structural + artificial columns (rhs is column n)
    int pivots = 0;

    void pivot(Index row, Index col) {
        t.row(row) /= t(row, col);
        for (Index r = 0; r < t.rows(); ++r) {
            if (r == row) continue;
            const double f = t(r, col);
            if (f != 0.0) t.row(r) -= f * t.row(row);
        }
        basis[row] = col;
        ++pivots;
    }

    /// Runs Bland's rule on cost vector `c` restricted to columns [0, active).
    LpStatus optimize(const Vector& c, Index active) {
        const Index m = t.rows();
        for (;;) {
            Index enter = -1;
            for (Index j = 0; j < active; ++j) {
                double reduced = c(j);
                for (Index r = 0; r < m; ++r) reduced -= c(basis[r]) * t(r, j);
                if (reduced < -kCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return LpStatus::optimal;
            Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Index r = 0; r < m; ++r) {
                const double a = t(r, enter);
                if (a <= kPivotTol) continue;
                const double ratio = std::max(t(r, n), 0.0) / a;
                const bool tie = leave >= 0 && std::abs(ratio - best_ratio) <= 1e-14;
                if (leave < 0 || (!tie && ratio < best_ratio) || (tie && basis[r] < basis[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return LpStatus::unbounded;
            pivot(leave, enter);
        }
    }
};

}  // namespace

LpSolution solve_lp(const Matrix& A, const Vector& b, const Vector& c,
                    const std::optional<std::vector<Index>>& initial_basis) {
    const Index m = A.rows();
    const Index n = A.cols();
    if (b.size() != m || c.size() != n) throw Error("solve_lp: dimension mismatch");

    LpSolution out;
    Tableau tab;

    if (initial_basis) {
        if (static_cast<Index>(initial_basis->size()) != m) throw Error("solve_lp: basis size mismatch");
        Matrix B(m, m);
        for (Index r = 0; r < m; ++r) B.col(r) = A.col((*initial_basis)[r]);
        Eigen::FullPivLU<Matrix> lu(B);
        if (!lu.isInvertible()) throw SingularSystemError("solve_lp: initial basis is singular");
        tab.t.resize(m, n + 1);
        tab.t.leftCols(n) = lu.solve(A);
        tab.t.col(n) = lu.solve(b);
        if (tab.t.col(n).minCoeff() < -1e-9) throw Error("solve_lp: initial basis is infeasible");
        tab.basis = *initial_basis;
        tab.n = n;
    } else {
        // Phase one on [A | I] with the artificial sum as objective.
        tab.n = n + m;
        tab.t = Matrix::Zero(m, n + m + 1);
        for (Index r = 0; r < m; ++r) {
            const double sign = b(r) < 0.0 ? -1.0 : 1.0;
            tab.t.row(r).head(n) = sign * A.row(r);
            tab.t(r, n + r) = 1.0;
            tab.t(r, n + m) = sign * b(r);
            tab.basis.push_back(n + r);
        }
        Vector phase1 = Vector::Zero(n + m);
        phase1.tail(m).setOnes();
        tab.optimize(phase1, n + m);
        double infeasibility = 0.0;
        for (Index r = 0; r < m; ++r)
            if (tab.basis[r] >= n) infeasibility += tab.t(r, n + m);
        if (infeasibility > 1e-9) {
            out.status = LpStatus::infeasible;
            out.pivots = tab.pivots;
            return out;
        }
        // Drive remaining (zero-level) artificials out; drop rows that are redundant.
        for (Index r = 0; r < tab.t.rows();) {
            if (tab.basis[r] < n) {
                ++r;
                continue;
            }
            Index col = -1;
            for (Index j = 0; j < n; ++j)
                if (std::abs(tab.t(r, j)) > kPivotTol) {
                    col = j;
                    break;
                }
            if (col >= 0) {
                tab.pivot(r, col);
                ++r;
            } else {
                Matrix reduced(tab.t.rows() - 1, tab.t.cols());
                reduced << tab.t.topRows(r), tab.t.bottomRows(tab.t.rows() - r - 1);
                tab.t = std::move(reduced);
                tab.basis.erase(tab.basis.begin() + r);
            }
        }
        // Discard the artificial columns.
        Matrix structural(tab.t.rows(), n + 1);
        structural << tab.t.leftCols(n), tab.t.col(n + m);
        tab.t = std::move(structural);
        tab.n = n;
    }

    out.status = tab.optimize(c, n);
    out.pivots = tab.pivots;
    out.basis = tab.basis;
    if (out.status != LpStatus::optimal) return out;
    out.x = Vector::Zero(n);
    for (Index r = 0; r < tab.t.rows(); ++r) out.x(tab.basis[r]) = std::max(tab.t(r, n), 0.0);
    out.objective = c.dot(out.x);
    return out;
}

}  // namespace dpomdp
