#include "dpomdp/lower_approx.hpp"

#include <functional>

namespace dpomdp {

std::string to_string(Scheme scheme) { return scheme == Scheme::d1 ? "d1" : "d2"; }

Scheme scheme_from_string(const std::string& text) {
    if (text == "d1" || text == "D1") return Scheme::d1;
    if (text == "d2" || text == "D2") return Scheme::d2;
    throw ValidationError("unknown scheme '" + text + "' (expected d1 or d2)");
}

namespace {

struct Branch {
    Index observation;
    double probability;
    Belief posterior;
};

/// Posteriors phi_u(x,z) for all z with p(z|x,u) > 1e-12.
std::vector<Branch> branches(const PomdpModel& model, const Belief& x, Index u) {
    std::vector<Branch> out;
    const Vector predicted = predicted_state(model, x, u);
    for (Index z = 0; z < model.num_observations; ++z) {
        Vector joint = model.observation[u].col(z).cwiseProduct(predicted);
        const double pz = joint.sum();
        if (pz <= tol::zero_observation) continue;
        out.push_back({z, pz, Belief(joint / pz)});
    }
    return out;
}

void accumulate_weights(Vector& row, const ConvexWeights& w, double scale) {
    for (const auto& [i, weight] : w.support) row(i) += scale * weight;
}

void finalize_row(Vector& row, Index state, Index u) {
    const double total = row.sum();
    if (std::abs(total - 1.0) > tol::modified_row)
        throw ValidationError("modified MDP row " + std::to_string(state) + " under action " + std::to_string(u) +
                              " sums to " + std::to_string(total));
    row /= total;
}

SparseRowMatrix to_sparse(const std::vector<Vector>& rows, Index cols) {
    std::vector<Eigen::Triplet<double>> entries;
    for (Index r = 0; r < static_cast<Index>(rows.size()); ++r)
        for (Index c = 0; c < cols; ++c)
            if (rows[r](c) != 0.0) entries.emplace_back(r, c, rows[r](c));
    SparseRowMatrix m(static_cast<Index>(rows.size()), cols);
    m.setFromTriplets(entries.begin(), entries.end());
    return m;
}

Vector d1_row(const PomdpModel& model, const GridScheme& grid, const Belief& x, Index u) {
    Vector row = Vector::Zero(grid.size());
    for (const auto& b : branches(model, x, u)) accumulate_weights(row, convex_coords(grid, b.posterior), b.probability);
    return row;
}

Vector d2_row(const ModifiedMdp& mdp, const ConvexWeights& w, Index u) {
    Vector row = Vector::Zero(mdp.num_support());
    for (const auto& [i, weight] : w.support)
        for (const auto& next : mdp.successors(i, u)) row(next.support_index) += weight * next.probability;
    return row;
}

}  // namespace

ModifiedMdp build_modified_mdp(const PomdpModel& model, const GridScheme& grid, Scheme scheme) {
    if (grid.dimension() != model.num_states) throw ValidationError("grid dimension does not match the model");
    const Index A = model.num_actions;
    ModifiedMdp out{.scheme = scheme, .grid = grid, .support = {}, .mdp = {}, .provenance = {}, .grid_successors = {}};

    if (scheme == Scheme::d1) {
        out.support = grid.points();
    } else {
        out.grid_successors.resize(grid.size() * A);
        for (Index i = 0; i < grid.size(); ++i) {
            for (Index u = 0; u < A; ++u) {
                auto& succ = out.grid_successors[i * A + u];
                for (auto& b : branches(model, grid.point(i), u)) {
                    Index at = -1;
                    for (Index c = 0; c < out.num_support(); ++c)
                        if (out.support[c].approx_equal(b.posterior)) {
                            at = c;
                            break;
                        }
                    if (at < 0) {
                        at = out.num_support();
                        out.support.push_back(std::move(b.posterior));
                        out.provenance.emplace_back();
                    }
                    out.provenance[at].push_back({i, u, b.observation});
                    succ.push_back({at, b.probability});
                }
            }
        }
    }

    const Index C = out.num_support();
    out.mdp.cost.resize(C, A);
    for (Index c = 0; c < C; ++c)
        for (Index u = 0; u < A; ++u) out.mdp.cost(c, u) = stage_cost(model, out.support[c], u);

    for (Index u = 0; u < A; ++u) {
        std::vector<Vector> rows(C);
        for (Index c = 0; c < C; ++c) {
            rows[c] = scheme == Scheme::d1 ? d1_row(model, grid, out.support[c], u)
                                           : d2_row(out, convex_coords(grid, out.support[c]), u);
            finalize_row(rows[c], c, u);
        }
        out.mdp.transition.push_back(to_sparse(rows, C));
    }
    out.mdp.validate();
    return out;
}

Vector transition_row(const PomdpModel& model, const ModifiedMdp& mdp, const Belief& x, Index u) {
    Vector row = mdp.scheme == Scheme::d1 ? d1_row(model, mdp.grid, x, u) : d2_row(mdp, convex_coords(mdp.grid, x), u);
    finalize_row(row, -1, u);
    return row;
}

std::vector<Vector> transition_rows(const PomdpModel& model, const ModifiedMdp& mdp, const Belief& x) {
    std::vector<Vector> rows;
    rows.reserve(model.num_actions);
    if (mdp.scheme == Scheme::d1) {
        for (Index u = 0; u < model.num_actions; ++u) rows.push_back(transition_row(model, mdp, x, u));
    } else {
        const ConvexWeights w = convex_coords(mdp.grid, x);
        for (Index u = 0; u < model.num_actions; ++u) {
            rows.push_back(d2_row(mdp, w, u));
            finalize_row(rows.back(), -1, u);
        }
    }
    return rows;
}

BackupResult evaluate_extension(const PomdpModel& model, const ModifiedMdp& mdp, const Vector& values,
                                const Belief& x, double alpha) {
    if (values.size() != mdp.num_support()) throw ValidationError("values must be indexed by the support set");
    BackupResult out;
    out.q.resize(model.num_actions);
    if (alpha == 0.0) {
        for (Index u = 0; u < model.num_actions; ++u) out.q(u) = stage_cost(model, x, u);
    } else {
        const auto rows = transition_rows(model, mdp, x);
        for (Index u = 0; u < model.num_actions; ++u) out.q(u) = stage_cost(model, x, u) + alpha * rows[u].dot(values);
    }
    out.argmin = argmin_set(out.q);
    out.value = out.q.minCoeff();
    return out;
}

namespace {

void guard_tree_size(const PomdpModel& model, int horizon) {
    const double branching = static_cast<double>(model.num_actions * model.num_observations);
    double nodes = 0.0, level = 1.0;
    for (int k = 0; k <= horizon; ++k) {
        nodes += level;
        level *= branching;
    }
    if (nodes > 1e6)
        throw Error("belief tree for horizon " + std::to_string(horizon) + " exceeds 10^6 nodes");
}

double exact_value(const PomdpModel& model, const Belief& x, int remaining, double alpha) {
    if (remaining == 0) return 0.0;
    return exact_backup(
               model, x, [&](const Belief& next) { return exact_value(model, next, remaining - 1, alpha); }, alpha)
        .value;
}

}  // namespace

double exact_nstage_value(const PomdpModel& model, const Belief& x0, int horizon, double alpha) {
    if (horizon < 0) throw ValidationError("horizon must be nonnegative");
    guard_tree_size(model, horizon);
    return exact_value(model, x0, horizon, alpha);
}

NStageValues nstage_lower_bound_check(const PomdpModel& model, const ModifiedMdp& mdp, int horizon,
                                      const Belief& x0, double alpha) {
    NStageValues out;
    out.exact = exact_nstage_value(model, x0, horizon, alpha);
    if (horizon == 0) return out;
    Vector values = Vector::Zero(mdp.num_support());
    for (int k = 1; k < horizon; ++k) {
        Vector next(mdp.num_support());
        for (Index c = 0; c < mdp.num_support(); ++c) {
            double best = std::numeric_limits<double>::infinity();
            for (Index u = 0; u < mdp.num_actions(); ++u) {
                const double q = mdp.mdp.cost(c, u) + alpha * mdp.mdp.transition[u].row(c).dot(values);
                best = std::min(best, q);
            }
            next(c) = best;
        }
        values = std::move(next);
    }
    out.approximate = evaluate_extension(model, mdp, values, x0, alpha).value;
    return out;
}

}  // namespace dpomdp
