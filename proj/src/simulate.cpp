#include "dpomdp/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace dpomdp {

namespace {

double run_trajectory(const PomdpModel& model, const PolicyOracle& policy, const Belief& x0, Index horizon,
                      std::uint64_t seed, Index index) {
    Rng rng = make_stream(seed, "trajectory", static_cast<std::uint64_t>(index));
    Index state = sample_categorical(x0.probs(), rng);
    Belief belief = x0;
    double total = 0.0;
    for (Index t = 0; t < horizon; ++t) {
        const Index u = policy(belief);
        total += model.cost(state, u);
        const auto step = sample_step(model, state, u, rng);
        belief = belief_update(model, belief, u, step.observation);
        state = step.next_state;
    }
    return total / static_cast<double>(horizon);
}

}  // namespace

SimulationReport simulate_trajectories(const PomdpModel& model, const PolicyOracle& policy, const Belief& x0,
                                       Index count, Index horizon, std::uint64_t seed, std::string descriptor,
                                       unsigned threads) {
    if (count < 1 || horizon < 1) throw ValidationError("trajectory count and horizon must be positive");
    SimulationReport out;
    out.averages.assign(count, 0.0);
    out.horizon = horizon;
    out.seed = seed;
    out.policy = std::move(descriptor);

    threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(count));
    if (threads == 1) {
        for (Index i = 0; i < count; ++i) out.averages[i] = run_trajectory(model, policy, x0, horizon, seed, i);
    } else {
        std::atomic<Index> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> workers;
        for (unsigned w = 0; w < threads; ++w)
            workers.emplace_back([&] {
                for (Index i = next++; i < count; i = next++) {
                    try {
                        out.averages[i] = run_trajectory(model, policy, x0, horizon, seed, i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        return;
                    }
                }
            });
        workers.clear();
        if (failure) std::rethrow_exception(failure);
    }

    double total = 0.0;
    for (double a : out.averages) total += a;
    out.mean = total / static_cast<double>(count);
    return out;
}

}  // namespace dpomdp
