#pragma once

#include "dpomdp/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dpomdp {

/// Finite belief set G that always contains the simplex vertices.
///
/// Points are deduplicated on construction (L-inf 1e-9, first occurrence wins)
/// and immutable afterwards.
class GridScheme {
  public:
    /// Throws ValidationError when a vertex e_s is missing or dimensions disagree.
    GridScheme(std::vector<Belief> points, std::string pattern, std::optional<std::uint64_t> seed = std::nullopt);

    const std::vector<Belief>& points() const noexcept { return points_; }
    const Belief& point(Index i) const { return points_[i]; }
    Index size() const noexcept { return static_cast<Index>(points_.size()); }
    Index dimension() const noexcept { return matrix_.rows(); }
    const std::string& pattern() const noexcept { return pattern_; }
    const std::optional<std::uint64_t>& seed() const noexcept { return seed_; }

    /// Points as columns (dimension x size).
    const Matrix& matrix() const noexcept { return matrix_; }
    /// Grid index of the vertex e_s.
    Index vertex_index(Index s) const { return vertex_index_[s]; }
    /// Index of a point equal to `x`, if any.
    std::optional<Index> find(const Belief& x) const;

  private:
    std::vector<Belief> points_;
    std::string pattern_;
    std::optional<std::uint64_t> seed_;
    Matrix matrix_;
    std::vector<Index> vertex_index_;
};

/// Vertices plus k evenly spaced interior points on every edge ("k-E").
GridScheme make_edge_grid(Index num_states, int k);

/// Vertices plus n uniformly sampled beliefs ("n-R").
GridScheme make_random_grid(Index num_states, int n, std::uint64_t seed);

/// Deduplicated union; patterns joined with '+'.
GridScheme combine_grids(const GridScheme& a, const GridScheme& b);

/// Builds a grid from a pattern such as "3-E", "10-R" or "2-E+10-R".
///
/// The first random part uses `seed` directly; later ones use sub-streams.
GridScheme make_grid(std::string_view pattern, Index num_states, std::uint64_t seed = 0);

/// Convex representation of a belief over grid points: sum_i w_i x_i = x.
struct ConvexWeights {
    std::vector<std::pair<Index, double>> support;  ///< (grid index, weight > 0), ascending index
    double objective = 0.0;                         ///< sum_i w_i ||x - x_i||_1
    double radius = 0.0;                            ///< max_i ||x - x_i||_1 over the support
};

/// Weights minimizing sum_i w_i ||x - x_i||_1 subject to sum_i w_i x_i = x, w >= 0.
///
/// Solved as a dense LP starting from the vertex basis (always feasible, so
/// phase one is unnecessary) with Bland's rule; the equality rows already imply
/// sum_i w_i = 1. Basic weights are recomputed from the final basis by a direct
/// solve, so reconstruction is accurate to rounding.
ConvexWeights convex_coords(const GridScheme& grid, const Belief& x);

/// Sampled lower estimate of the discretization fineness: the largest support
/// radius over `samples` uniform beliefs.
double estimate_epsilon(const GridScheme& grid, Index samples, std::uint64_t seed);

/// Same estimate over caller-supplied beliefs.
double estimate_epsilon(const GridScheme& grid, const std::vector<Belief>& samples);

}  // namespace dpomdp
