#include "dpomdp/model.hpp"

#include <sstream>

namespace dpomdp {

Belief::Belief(Vector probs) : probs_(std::move(probs)) {
    if (!is_probability_vector(probs_, tol::probability_row))
        throw ValidationError("belief is not a probability vector");
}

Belief Belief::normalized(const Vector& weights) {
    if (weights.size() == 0) throw ValidationError("empty belief");
    if (weights.minCoeff() < -tol::belief_equal) throw ValidationError("belief has a negative entry");
    Vector p = weights.cwiseMax(0.0);
    const double total = p.sum();
    if (std::abs(total - 1.0) > tol::renormalize)
        throw ValidationError("belief weights sum to " + std::to_string(total));
    p /= total;
    return Belief(std::move(p));
}

Belief Belief::vertex(Index num_states, Index s) {
    Vector p = Vector::Zero(num_states);
    p(s) = 1.0;
    return Belief(std::move(p));
}

Belief Belief::uniform(Index num_states) {
    return Belief(Vector::Constant(num_states, 1.0 / static_cast<double>(num_states)));
}

namespace {

std::string row_label(const std::vector<std::string>& names, Index i) {
    if (i < static_cast<Index>(names.size())) return names[i];
    return std::to_string(i);
}

}  // namespace

std::string PomdpModel::action_label(Index u) const { return row_label(action_names, u); }

void PomdpModel::validate() const {
    if (num_states <= 0 || num_actions <= 0 || num_observations <= 0)
        throw ValidationError("model dimensions must be positive");
    if (static_cast<Index>(transition.size()) != num_actions || static_cast<Index>(observation.size()) != num_actions)
        throw ValidationError("per-action tables missing");
    if (cost.rows() != num_states || cost.cols() != num_actions)
        throw ValidationError("cost table has wrong shape");
    if (!cost.allFinite()) throw ValidationError("cost table has non-finite entries");
    if (!(discount >= 0.0 && discount <= 1.0)) throw ValidationError("discount outside [0,1]");
    for (Index u = 0; u < num_actions; ++u) {
        const Matrix& t = transition[u];
        const Matrix& o = observation[u];
        if (t.rows() != num_states || t.cols() != num_states)
            throw ValidationError("transition table for action " + action_label(u) + " has wrong shape");
        if (o.rows() != num_states || o.cols() != num_observations)
            throw ValidationError("observation table for action " + action_label(u) + " has wrong shape");
        for (Index s = 0; s < num_states; ++s) {
            if (!is_probability_vector(t.row(s).transpose(), tol::probability_row)) {
                std::ostringstream msg;
                msg << "T: " << action_label(u) << " : " << row_label(state_names, s) << " row sums to "
                    << t.row(s).sum() << " (not a probability row)";
                throw ValidationError(msg.str());
            }
            if (!is_probability_vector(o.row(s).transpose(), tol::probability_row)) {
                std::ostringstream msg;
                msg << "O: " << action_label(u) << " : " << row_label(state_names, s) << " row sums to "
                    << o.row(s).sum() << " (not a probability row)";
                throw ValidationError(msg.str());
            }
        }
    }
    if (start && start->size() != num_states) throw ValidationError("start belief has wrong dimension");
}

Vector predicted_state(const PomdpModel& model, const Belief& x, Index u) {
    return model.transition[u].transpose() * x.probs();
}

Vector observation_probability(const PomdpModel& model, const Belief& x, Index u) {
    return model.observation[u].transpose() * predicted_state(model, x, u);
}

Belief belief_update(const PomdpModel& model, const Belief& x, Index u, Index z) {
    const Vector predicted = predicted_state(model, x, u);
    Vector joint = model.observation[u].col(z).cwiseProduct(predicted);
    const double pz = joint.sum();
    if (pz <= tol::zero_observation)
        throw ZeroProbabilityObservation("observation " + std::to_string(z) + " has probability " +
                                         std::to_string(pz) + " under action " + model.action_label(u));
    joint /= pz;
    return Belief(std::move(joint));
}

BackupResult exact_backup(const PomdpModel& model, const Belief& x, const ValueOracle& value, double alpha) {
    BackupResult out;
    out.q.resize(model.num_actions);
    for (Index u = 0; u < model.num_actions; ++u) {
        double q = stage_cost(model, x, u);
        if (alpha != 0.0) {
            const Vector predicted = predicted_state(model, x, u);
            double continuation = 0.0;
            for (Index z = 0; z < model.num_observations; ++z) {
                Vector joint = model.observation[u].col(z).cwiseProduct(predicted);
                const double pz = joint.sum();
                if (pz <= tol::zero_observation) continue;
                continuation += pz * value(Belief(joint / pz));
            }
            q += alpha * continuation;
        }
        out.q(u) = q;
    }
    out.argmin = argmin_set(out.q);
    out.value = out.q.minCoeff();
    return out;
}

Index sample_categorical(const Eigen::Ref<const Vector>& probs, Rng& rng) {
    const double r = uniform01(rng);
    double acc = 0.0;
    Index last_positive = 0;
    for (Index i = 0; i < probs.size(); ++i) {
        if (probs(i) <= 0.0) continue;
        acc += probs(i);
        last_positive = i;
        if (r < acc) return i;
    }
    return last_positive;  // rounding residue in the cumulative sum
}

StepOutcome sample_step(const PomdpModel& model, Index s, Index u, Rng& rng) {
    const Index next = sample_categorical(model.transition[u].row(s).transpose(), rng);
    const Index z = sample_categorical(model.observation[u].row(next).transpose(), rng);
    return {next, z};
}

Belief sample_uniform_belief(Index num_states, Rng& rng) {
    Vector draws(num_states);
    for (Index s = 0; s < num_states; ++s) draws(s) = exponential1(rng);
    double total = draws.sum();
    if (total <= 0.0) {
        draws.setOnes();
        total = static_cast<double>(num_states);
    }
    return Belief(draws / total);
}

}  // namespace dpomdp
