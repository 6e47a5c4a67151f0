#pragma once

#include "dpomdp/discount.hpp"
#include "dpomdp/simulate.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dpomdp {

inline constexpr const char* kVersion = DPOMDP_VERSION;
inline constexpr int kSchemaVersion = 1;

enum class Criterion { discounted, average };

/// Settings of one pipeline run; echoed into every artifact.
struct RunConfig {
    std::string problem;
    Scheme scheme = Scheme::d2;
    std::string grid = "0-E";
    Criterion criterion = Criterion::average;
    std::optional<double> alpha;
    int order = 2;
    double tol = 1e-8;
    std::uint64_t seed = 0;
    Index trajectories = 160;
    Index horizon = 500;
    Index bound_samples = 500;
    int bootstrap = 100;
    std::string policy = "step2";
    std::string format = "json";
    std::string output;
    bool as_rewards = false;
    unsigned threads = 1;

    /// Throws ValidationError when fields contradict each other.
    void validate() const;
};

std::string to_string(Criterion criterion);
Criterion criterion_from_string(const std::string& text);

using Json = nlohmann::ordered_json;

Json to_json(const RunConfig& config);
Json to_json(const Belief& x);
Json to_json(const Vector& v);
Json to_json(const GridScheme& grid);
Json to_json(const ModifiedMdp& mdp);
Json to_json(const DiscountSolution& sol);
Json to_json(const SensitiveSolution& sol);
Json to_json(const ChainDecomposition& chains);
Json to_json(const BoundReport& report);
Json to_json(const SimulationReport& report);

/// Wraps a payload as {"version", "schema", "config", <kind>: payload}.
Json artifact(const std::string& kind, const Json& payload, const RunConfig& config);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& text);
void write_csv_row(std::ostream& os, const std::vector<std::string>& fields);

/// Shortest round-trip decimal text of a double.
std::string format_number(double value);

}  // namespace dpomdp
