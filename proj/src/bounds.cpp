#include "dpomdp/bounds.hpp"

#include <algorithm>
#include <cmath>

namespace dpomdp {

namespace {

std::vector<Belief> sample_beliefs(Index num_states, Index samples, std::uint64_t seed, std::string_view tag) {
    std::vector<Belief> out;
    out.reserve(samples);
    Rng rng = make_stream(seed, tag, 0);
    for (Index m = 0; m < samples; ++m) out.push_back(sample_uniform_belief(num_states, rng));
    return out;
}

std::vector<double> quantiles(std::vector<double> values) {
    if (values.empty()) return {};
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double pos = p * static_cast<double>(values.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, values.size() - 1);
        out.push_back(values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]));
    }
    return out;
}

}  // namespace

BoundReport estimate_bound_delta(const PomdpModel& model, const ModifiedMdp& mdp, const SensitiveSolution& sol,
                                    const std::vector<Belief>& beliefs) {
    const ValueOracle bias = [&](const Belief& y) { return extend_average_solution(model, mdp, sol, y).bias; };
    std::vector<double> residuals;
    residuals.reserve(beliefs.size());
    for (const auto& x : beliefs) {
        const auto ext = extend_average_solution(model, mdp, sol, x);
        residuals.push_back(exact_backup(model, x, bias, 1.0).value - ext.gain - ext.bias);
    }
    BoundReport out;
    out.evaluated = static_cast<Index>(beliefs.size());
    out.samples = out.evaluated;
    out.delta_hat = residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
    out.max_gain = sol.gain.maxCoeff();
    out.upper_bound = out.max_gain + out.delta_hat;
    out.quantiles = quantiles(std::move(residuals));
    return out;
}

BoundReport estimate_bound_delta(const PomdpModel& model, const ModifiedMdp& mdp, const SensitiveSolution& sol,
                                    Index samples, std::uint64_t seed) {
    auto beliefs = sample_beliefs(model.num_states, samples, seed, "bound-delta");
    beliefs.insert(beliefs.end(), mdp.support.begin(), mdp.support.end());
    auto out = estimate_bound_delta(model, mdp, sol, beliefs);
    out.samples = samples;
    out.seed = seed;
    return out;
}

PolicyDeltas policy_delta_bounds(const PomdpModel& model, const PolicyOracle& policy, const ValueOracle& gain,
                                 const ValueOracle& bias, const std::vector<Belief>& beliefs) {
    PolicyDeltas out;
    out.delta_plus = -std::numeric_limits<double>::infinity();
    out.delta_minus = std::numeric_limits<double>::infinity();
    for (const auto& x : beliefs) {
        const Index u = policy(x);
        const Vector pz = observation_probability(model, x, u);
        double next = 0.0;
        for (Index z = 0; z < model.num_observations; ++z)
            if (pz(z) > tol::zero_observation) next += pz(z) * bias(belief_update(model, x, u, z));
        const double r = stage_cost(model, x, u) + next - gain(x) - bias(x);
        out.delta_plus = std::max(out.delta_plus, r);
        out.delta_minus = std::min(out.delta_minus, r);
    }
    out.evaluated = static_cast<Index>(beliefs.size());
    if (beliefs.empty()) out.delta_plus = out.delta_minus = 0.0;
    return out;
}

PolicyDeltas policy_delta_bounds(const PomdpModel& model, const PolicyOracle& policy, const ValueOracle& gain,
                                 const ValueOracle& bias, Index samples, std::uint64_t seed,
                                 const std::vector<Belief>& extra) {
    auto beliefs = sample_beliefs(model.num_states, samples, seed, "policy-delta");
    beliefs.insert(beliefs.end(), extra.begin(), extra.end());
    return policy_delta_bounds(model, policy, gain, bias, beliefs);
}

double bootstrap_standard_error(const std::vector<double>& samples, int resamples, std::uint64_t seed) {
    if (samples.size() < 2) throw ValidationError("bootstrap needs at least two samples");
    if (resamples < 2) throw ValidationError("bootstrap needs at least two resamples");
    Rng rng = make_stream(seed, "bootstrap", 0);
    const auto n = static_cast<Index>(samples.size());
    std::vector<double> means(resamples);
    for (auto& mean : means) {
        double total = 0.0;
        for (Index i = 0; i < n; ++i) total += samples[uniform_index(rng, n)];
        mean = total / static_cast<double>(n);
    }
    double centre = 0.0;
    for (double m : means) centre += m;
    centre /= resamples;
    double var = 0.0;
    for (double m : means) var += (m - centre) * (m - centre);
    return std::sqrt(var / resamples);
}

}  // namespace dpomdp
