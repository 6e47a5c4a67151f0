#pragma once

#include "dpomdp/avgcost.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace dpomdp {

/// Sampled average-cost upper bound: max gain on C plus the largest residual
/// (T h)(x) - J(x) - h(x) over the sampled beliefs. The residual maximum is a
/// sampled under-estimate of the exact supremum.
struct BoundReport {
    double delta_hat = 0.0;
    double upper_bound = 0.0;
    double max_gain = 0.0;
    Index samples = 0;  ///< random beliefs, excluding the support beliefs that are always added
    Index evaluated = 0;
    std::uint64_t seed = 0;
    /// Residual quantiles at 0, 0.25, 0.5, 0.75 and 1.
    std::vector<double> quantiles;
};

BoundReport estimate_bound_delta(const PomdpModel& model, const ModifiedMdp& mdp, const SensitiveSolution& sol,
                                    Index samples, std::uint64_t seed);

/// Same estimate over caller-supplied beliefs only.
BoundReport estimate_bound_delta(const PomdpModel& model, const ModifiedMdp& mdp, const SensitiveSolution& sol,
                                    const std::vector<Belief>& beliefs);

using PolicyOracle = std::function<int(const Belief&)>;

/// Sampled extremes of g_mu(x) + E{h(x')} - J(x) - h(x) under the exact belief dynamics.
struct PolicyDeltas {
    double delta_plus = 0.0;
    double delta_minus = 0.0;
    Index evaluated = 0;
};

PolicyDeltas policy_delta_bounds(const PomdpModel& model, const PolicyOracle& policy, const ValueOracle& gain,
                                 const ValueOracle& bias, const std::vector<Belief>& beliefs);

/// Samples `samples` uniform beliefs from `seed` (plus any `extra` beliefs).
PolicyDeltas policy_delta_bounds(const PomdpModel& model, const PolicyOracle& policy, const ValueOracle& gain,
                                 const ValueOracle& bias, Index samples, std::uint64_t seed,
                                 const std::vector<Belief>& extra = {});

/// Population standard deviation of B bootstrap resample means.
double bootstrap_standard_error(const std::vector<double>& samples, int resamples, std::uint64_t seed);

}  // namespace dpomdp
