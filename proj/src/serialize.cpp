#include "dpomdp/serialize.hpp"

#include <charconv>

namespace dpomdp {

std::string to_string(Criterion criterion) { return criterion == Criterion::average ? "average" : "discounted"; }

Criterion criterion_from_string(const std::string& text) {
    if (text == "average") return Criterion::average;
    if (text == "discounted") return Criterion::discounted;
    throw ValidationError("unknown criterion '" + text + "' (expected average or discounted)");
}

void RunConfig::validate() const {
    if (criterion == Criterion::discounted) {
        if (!alpha) throw ValidationError("--alpha is required for the discounted criterion");
        if (!(*alpha >= 0.0 && *alpha < 1.0)) throw ValidationError("--alpha must lie in [0, 1)");
    } else if (alpha) {
        throw ValidationError("--alpha applies only to the discounted criterion");
    }
    if (order < -1) throw ValidationError("--order must be at least -1");
    if (!(tol > 0.0)) throw ValidationError("--tol must be positive");
    if (trajectories < 1 || horizon < 1) throw ValidationError("--trajectories and --horizon must be positive");
    if (bound_samples < 0) throw ValidationError("--samples must be nonnegative");
    if (bootstrap < 2) throw ValidationError("--bootstrap must be at least 2");
    if (policy != "step2" && policy != "lookahead") throw ValidationError("--policy must be step2 or lookahead");
    if (format != "json" && format != "csv" && format != "text")
        throw ValidationError("--format must be json, csv or text");
}

Json to_json(const RunConfig& c) {
    Json j;
    j["problem"] = c.problem;
    j["scheme"] = to_string(c.scheme);
    j["grid"] = c.grid;
    j["criterion"] = to_string(c.criterion);
    j["alpha"] = c.alpha ? Json(*c.alpha) : Json(nullptr);
    j["order"] = c.order;
    j["tol"] = c.tol;
    j["seed"] = c.seed;
    j["trajectories"] = c.trajectories;
    j["horizon"] = c.horizon;
    j["bound_samples"] = c.bound_samples;
    j["bootstrap"] = c.bootstrap;
    j["policy"] = c.policy;
    j["format"] = c.format;
    j["as_rewards"] = c.as_rewards;
    return j;
}

Json to_json(const Vector& v) {
    Json j = Json::array();
    for (Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

Json to_json(const Belief& x) { return to_json(x.probs()); }

Json to_json(const GridScheme& grid) {
    Json j;
    j["pattern"] = grid.pattern();
    j["seed"] = grid.seed() ? Json(*grid.seed()) : Json(nullptr);
    j["points"] = Json::array();
    for (const auto& p : grid.points()) j["points"].push_back(to_json(p));
    return j;
}

Json to_json(const ModifiedMdp& mdp) {
    Json j;
    j["scheme"] = to_string(mdp.scheme);
    j["grid"] = to_json(mdp.grid);
    j["support"] = Json::array();
    for (const auto& c : mdp.support) j["support"].push_back(to_json(c));
    j["transitions"] = Json::array();
    for (const auto& P : mdp.mdp.transition) {
        Json rows = Json::array();
        for (Index r = 0; r < P.rows(); ++r) {
            Json row = Json::array();
            for (SparseRowMatrix::InnerIterator it(P, r); it; ++it) row.push_back({it.col(), it.value()});
            rows.push_back(std::move(row));
        }
        j["transitions"].push_back(std::move(rows));
    }
    j["cost"] = Json::array();
    for (Index c = 0; c < mdp.mdp.cost.rows(); ++c) j["cost"].push_back(to_json(Vector(mdp.mdp.cost.row(c).transpose())));
    if (mdp.scheme == Scheme::d2) {
        j["provenance"] = Json::array();
        for (const auto& origins : mdp.provenance) {
            Json list = Json::array();
            for (const auto& o : origins) list.push_back({o.grid_index, o.action, o.observation});
            j["provenance"].push_back(std::move(list));
        }
    }
    return j;
}

Json to_json(const DiscountSolution& sol) {
    Json j;
    j["alpha"] = sol.alpha;
    j["values"] = to_json(sol.values);
    j["policy"] = sol.greedy_policy;
    j["residual"] = sol.residual;
    j["tolerance"] = sol.tolerance;
    j["iterations"] = sol.iterations;
    return j;
}

Json to_json(const ChainDecomposition& chains) {
    Json j;
    j["classes"] = chains.classes;
    j["transient"] = chains.transient;
    return j;
}

Json to_json(const SensitiveSolution& sol) {
    Json j;
    j["order"] = sol.order;
    j["gain"] = to_json(sol.gain);
    j["bias"] = to_json(sol.bias);
    j["w"] = Json::array();
    for (const auto& wk : sol.w) j["w"].push_back(to_json(wk));
    j["policy"] = sol.policy;
    j["residuals"] = sol.residuals;
    j["policy_in_argmin"] = sol.policy_in_argmin;
    j["chains"] = to_json(sol.chains);
    j["iterations"] = sol.iterations;
    return j;
}

Json to_json(const BoundReport& r) {
    Json j;
    j["delta_hat"] = r.delta_hat;
    j["upper_bound"] = r.upper_bound;
    j["max_gain"] = r.max_gain;
    j["samples"] = r.samples;
    j["evaluated"] = r.evaluated;
    j["seed"] = r.seed;
    j["residual_quantiles"] = r.quantiles;
    j["note"] = "sampled (under-estimate of sup)";
    return j;
}

Json to_json(const SimulationReport& r) {
    Json j;
    j["policy"] = r.policy;
    j["trajectories"] = r.averages.size();
    j["horizon"] = r.horizon;
    j["seed"] = r.seed;
    j["mean"] = r.mean;
    j["standard_error"] = r.standard_error;
    j["averages"] = r.averages;
    return j;
}

Json artifact(const std::string& kind, const Json& payload, const RunConfig& config) {
    Json j;
    j["version"] = kVersion;
    j["schema"] = kSchemaVersion;
    j["config"] = to_json(config);
    j[kind] = payload;
    return j;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << csv_field(fields[i]);
    os << "\r\n";
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

}  // namespace dpomdp
