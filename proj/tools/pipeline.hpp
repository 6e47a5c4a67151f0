#pragma once

#include "dpomdp/cassandra.hpp"
#include "dpomdp/serialize.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dpomdp::cli {

/// Model, modified MDP and the solution for one configuration.
struct Pipeline {
    PomdpModel model;
    ModifiedMdp mdp;
    std::optional<SensitiveSolution> average;
    std::optional<DiscountSolution> discounted;
};

Pipeline run_pipeline(const RunConfig& config);
Pipeline run_pipeline(const RunConfig& config, const PomdpModel& model);

/// Policy selected by `config.policy` ("step2" or "lookahead") for the solved pipeline.
PolicyOracle make_policy(const Pipeline& pipeline, const RunConfig& config);

BoundReport run_bound(const Pipeline& pipeline, const RunConfig& config);
SimulationReport run_simulation(const Pipeline& pipeline, const RunConfig& config);

int cmd_solve(const RunConfig& config, std::ostream& out);
int cmd_bound(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);

/// Published reference values for one benchmark.
struct Table2Target {
    std::string key;  ///< file-name prefix: paint, bridge or shuttle
    std::string name;
    std::vector<Scheme> lb_schemes;
    std::string lb_grid;
    Scheme sim_scheme;
    std::string sim_grid;
    Index trajectories;
    double lb, ub, sim;
    double lb_tol, ub_tol;
};

const std::vector<Table2Target>& table2_targets();

/// First `*.pomdp` file (case-insensitive) in `dir` whose name starts with `key`.
std::optional<std::filesystem::path> find_problem(const std::filesystem::path& dir, const std::string& key);

struct Table2Row {
    std::string name;
    std::string error;  ///< non-empty when the row could not be computed
    std::vector<std::pair<Scheme, double>> lb;  ///< start-belief gain per LB scheme
    std::vector<std::pair<Scheme, double>> ub;
    double sim_mean = 0.0;
    double sim_se = 0.0;
    bool lb_pass = false, ub_pass = false, sim_pass = false;
};

Table2Row run_table2_row(const Table2Target& target, const std::filesystem::path& file, const RunConfig& base);
int cmd_table2(const std::filesystem::path& dir, const RunConfig& base, std::ostream& out);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dpomdp::cli
