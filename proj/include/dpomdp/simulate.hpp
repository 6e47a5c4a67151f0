#pragma once

#include "dpomdp/bounds.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dpomdp {

struct SimulationReport {
    std::vector<double> averages;  ///< per-trajectory average cost, by trajectory index
    double mean = 0.0;
    double standard_error = 0.0;  ///< filled in by the caller via bootstrap_standard_error
    Index horizon = 0;
    std::uint64_t seed = 0;
    std::string policy;
};

/// Monte-Carlo average cost of `policy` from x0. Trajectory i draws from the
/// sub-stream (seed, "trajectory", i), so results do not depend on `threads`.
SimulationReport simulate_trajectories(const PomdpModel& model, const PolicyOracle& policy, const Belief& x0,
                                       Index count, Index horizon, std::uint64_t seed, std::string descriptor = {},
                                       unsigned threads = 1);

}  // namespace dpomdp
