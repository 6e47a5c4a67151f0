#pragma once

#include "dpomdp/finite_mdp.hpp"
#include "dpomdp/grids.hpp"
#include "dpomdp/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace dpomdp {

/// Which lower-bounding interpolation the modified belief MDP uses.
///
/// `d1` interpolates the posterior of the current belief over the grid:
///   min_u [x'g_u + a sum_z p(z|x,u) sum_i w_i(phi_u(x,z)) J(x_i)].
/// `d2` interpolates the current belief first and then branches from each grid point:
///   min_u [x'g_u + a sum_i w_i(x) sum_z p(z|x_i,u) J(phi_u(x_i,z))].
enum class Scheme { d1, d2 };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& text);

/// Generating triple of a `d2` supporting belief: phi_u(x_i, z).
struct SupportOrigin {
    Index grid_index;
    Index action;
    Index observation;
};

/// A successor in C with its probability, p(z|x_i,u) for `d2` tables.
struct Successor {
    Index support_index;
    double probability;
};

/// Finite-state MDP on the supporting beliefs C that realizes one scheme.
struct ModifiedMdp {
    Scheme scheme = Scheme::d1;
    GridScheme grid;
    std::vector<Belief> support;
    FiniteMdp mdp;
    /// d2 only: for each support index, every (i, u, z) that generates it.
    std::vector<std::vector<SupportOrigin>> provenance;
    /// d2 only: successors of grid point i under u, stored at [i * num_actions + u].
    std::vector<std::vector<Successor>> grid_successors;

    Index num_support() const noexcept { return static_cast<Index>(support.size()); }
    Index num_actions() const noexcept { return mdp.num_actions(); }
    const std::vector<Successor>& successors(Index grid_index, Index u) const {
        return grid_successors[grid_index * num_actions() + u];
    }
};

/// Builds the modified MDP for `scheme` on grid `grid`.
///
/// Observations with p(z|x,u) <= 1e-12 are skipped. Rows whose total is within
/// 1e-8 of one are rescaled; anything else raises ValidationError.
ModifiedMdp build_modified_mdp(const PomdpModel& model, const GridScheme& grid, Scheme scheme);

/// One-step distribution over C from an arbitrary belief under action u (dense, length |C|).
Vector transition_row(const PomdpModel& model, const ModifiedMdp& mdp, const Belief& x, Index u);

/// All actions' rows at once; for `d2` the interpolation LP is solved only once.
std::vector<Vector> transition_rows(const PomdpModel& model, const ModifiedMdp& mdp, const Belief& x);

/// The scheme's backup at an arbitrary belief with `values` given on C.
BackupResult evaluate_extension(const PomdpModel& model, const ModifiedMdp& mdp, const Vector& values,
                                const Belief& x, double alpha);

struct NStageValues {
    double approximate = 0.0;  ///< N modified backups from J_0 = 0, evaluated at x0
    double exact = 0.0;        ///< N exact belief-space backups from J_0 = 0 at x0
};

/// Finite-horizon comparison of the modified MDP against exact dynamic programming
/// over the reachable belief tree. Throws Error when the tree exceeds 10^6 nodes.
NStageValues nstage_lower_bound_check(const PomdpModel& model, const ModifiedMdp& mdp, int horizon,
                                      const Belief& x0, double alpha);

/// Exact N-stage optimal cost from x0 with zero terminal cost.
double exact_nstage_value(const PomdpModel& model, const Belief& x0, int horizon, double alpha);

}  // namespace dpomdp
