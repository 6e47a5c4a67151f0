#pragma once

#include "dpomdp/rng.hpp"
#include "dpomdp/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dpomdp {

/// A probability distribution over hidden states.
class Belief {
  public:
    Belief() = default;

    /// Validates `probs` (nonnegative, sums to one within 1e-9) and stores it unchanged.
    explicit Belief(Vector probs);

    /// Clamps tiny negatives and rescales to sum one. Throws when the input is not
    /// close to a distribution (entries below -1e-9 or a sum off by more than 1e-6).
    static Belief normalized(const Vector& weights);

    static Belief vertex(Index num_states, Index s);
    static Belief uniform(Index num_states);

    const Vector& probs() const noexcept { return probs_; }
    Index size() const noexcept { return probs_.size(); }
    double operator[](Index s) const { return probs_(s); }

    /// Same belief up to the L-inf tolerance used for deduplication.
    bool approx_equal(const Belief& other, double tolerance = tol::belief_equal) const {
        return size() == other.size() && linf_distance(probs_, other.probs_) <= tolerance;
    }

  private:
    Vector probs_;
};

/// Finite POMDP with expected per-stage costs g_u(s).
///
/// Tables are stored per action: transition[u](s, s'), observation[u](s', z)
/// and cost(s, u).
struct PomdpModel {
    Index num_states = 0;
    Index num_actions = 0;
    Index num_observations = 0;
    std::vector<Matrix> transition;
    std::vector<Matrix> observation;
    Matrix cost;
    double discount = 1.0;
    std::optional<Belief> start;
    std::vector<std::string> state_names;
    std::vector<std::string> action_names;
    std::vector<std::string> observation_names;

    /// Throws ValidationError naming the first offending table row.
    void validate() const;

    std::string action_label(Index u) const;

    Belief start_belief() const { return start ? *start : Belief::uniform(num_states); }
};

/// Any evaluable map from beliefs to costs.
using ValueOracle = std::function<double(const Belief&)>;

/// One-step predicted state distribution sum_s x(s) P(.|s,u).
Vector predicted_state(const PomdpModel& model, const Belief& x, Index u);

/// p(z|x,u) for all observations z.
Vector observation_probability(const PomdpModel& model, const Belief& x, Index u);

/// Bayes posterior phi_u(x,z). Throws ZeroProbabilityObservation when p(z|x,u) <= 1e-12.
Belief belief_update(const PomdpModel& model, const Belief& x, Index u, Index z);

inline double stage_cost(const PomdpModel& model, const Belief& x, Index u) {
    return x.probs().dot(model.cost.col(u));
}

struct BackupResult {
    double value = 0.0;
    std::vector<int> argmin;  ///< all actions within 1e-9 of the minimum, ascending
    Vector q;                 ///< per-action backed-up values

    int action() const { return argmin.front(); }
};

/// min_u [x'g_u + alpha sum_{z: p(z|x,u) > 1e-12} p(z|x,u) J(phi_u(x,z))].
BackupResult exact_backup(const PomdpModel& model, const Belief& x, const ValueOracle& value, double alpha);

struct StepOutcome {
    Index next_state;
    Index observation;
};

/// Draws s' ~ P(.|s,u) then z ~ P(.|s',u).
StepOutcome sample_step(const PomdpModel& model, Index s, Index u, Rng& rng);

/// Inverse-CDF draw from a probability vector.
Index sample_categorical(const Eigen::Ref<const Vector>& probs, Rng& rng);

/// Uniform belief on the simplex (Dirichlet(1,...,1) from normalized exponentials).
Belief sample_uniform_belief(Index num_states, Rng& rng);

}  // namespace dpomdp
