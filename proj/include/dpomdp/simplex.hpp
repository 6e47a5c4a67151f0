#pragma once

#include "dpomdp/types.hpp"

#include <optional>
#include <vector>

namespace dpomdp {

enum class LpStatus { optimal, infeasible, unbounded };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    Vector x;                  ///< primal solution (size n), basic feasible
    std::vector<Index> basis;  ///< basic column per remaining constraint row
    double objective = 0.0;
    int pivots = 0;
};

/// Dense tableau simplex for  min c'x  s.t.  A x = b,  x >= 0.
///
/// Pivoting follows Bland's rule (lowest-index entering column, lowest-index
/// leaving variable among ratio ties), so the result is a deterministic function
/// of the input and cycling cannot occur. When `initial_basis` is given it must
/// be primal feasible and phase one is skipped; otherwise artificial variables
/// are used. Redundant equality rows are dropped after phase one.
LpSolution solve_lp(const Matrix& A, const Vector& b, const Vector& c,
                    const std::optional<std::vector<Index>>& initial_basis = std::nullopt);

}  // namespace dpomdp
