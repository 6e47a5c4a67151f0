#include "pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace dpomdp::cli {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(), [](unsigned char c) { return std::tolower(c); });
    return text;
}

std::string join_belief(const Belief& x) {
    std::string out;
    for (Index s = 0; s < x.size(); ++s) out += (s ? " " : "") + format_number(x[s]);
    return out;
}

double display(double cost, const RunConfig& config) { return config.as_rewards ? -cost : cost; }

/// Writes `body` to config.output when set, otherwise to `out`.
void emit(const RunConfig& config, std::ostream& out, const std::string& body) {
    if (config.output.empty()) {
        out << body;
        return;
    }
    std::ofstream file(config.output, std::ios::binary);
    if (!file) throw Error("cannot write " + config.output);
    file << body;
    if (!file) throw Error("failed writing " + config.output);
}

std::string config_cell(const RunConfig& config) { return to_json(config).dump(); }

}  // namespace

Pipeline run_pipeline(const RunConfig& config, const PomdpModel& model) {
    config.validate();
    const GridScheme grid = make_grid(config.grid, model.num_states, config.seed);
    Pipeline p{model, build_modified_mdp(model, grid, config.scheme), std::nullopt, std::nullopt};
    if (config.criterion == Criterion::average)
        p.average = solve_multichain(p.mdp, config.order);
    else
        p.discounted = value_iteration(p.mdp, *config.alpha, config.tol);
    return p;
}

Pipeline run_pipeline(const RunConfig& config) {
    if (config.problem.empty()) throw ValidationError("--problem is required");
    return run_pipeline(config, parse_pomdp_file(config.problem));
}

PolicyOracle make_policy(const Pipeline& p, const RunConfig& config) {
    const bool lookahead = config.policy == "lookahead";
    if (p.discounted) {
        if (lookahead) return [&p](const Belief& x) { return lookahead_action(p.model, p.mdp, *p.discounted, x); };
        return [&p](const Belief& x) { return greedy_modified_action(p.model, p.mdp, *p.discounted, x); };
    }
    if (lookahead)
        return [&p](const Belief& x) {
            const ValueOracle bias = [&p](const Belief& y) {
                return extend_average_solution(p.model, p.mdp, *p.average, y).bias;
            };
            return exact_backup(p.model, x, bias, 1.0).action();
        };
    return [&p](const Belief& x) { return extend_average_solution(p.model, p.mdp, *p.average, x).action(); };
}

BoundReport run_bound(const Pipeline& p, const RunConfig& config) {
    if (!p.average) throw ValidationError("bounds are defined for the average criterion");
    return estimate_bound_delta(p.model, p.mdp, *p.average, config.bound_samples, config.seed);
}

SimulationReport run_simulation(const Pipeline& p, const RunConfig& config) {
    const std::string descriptor =
        config.policy + ":" + to_string(config.scheme) + ":" + config.grid + ":" + to_string(config.criterion);
    auto report = simulate_trajectories(p.model, make_policy(p, config), p.model.start_belief(), config.trajectories,
                                        config.horizon, config.seed, descriptor, config.threads);
    report.standard_error = bootstrap_standard_error(report.averages, config.bootstrap, config.seed);
    return report;
}

int cmd_solve(const RunConfig& config, std::ostream& out) {
    const Pipeline p = run_pipeline(config);
    const Belief x0 = p.model.start_belief();
    std::ostringstream text;
    text << std::setprecision(10);
    double at_start = 0.0, lo = 0.0, hi = 0.0;
    if (p.average) {
        lo = p.average->gain.minCoeff();
        hi = p.average->gain.maxCoeff();
        at_start = extend_average_solution(p.model, p.mdp, *p.average, x0).gain;
    } else {
        lo = p.discounted->values.minCoeff();
        hi = p.discounted->values.maxCoeff();
        at_start = evaluate_extension(p.model, p.mdp, p.discounted->values, x0, p.discounted->alpha).value;
    }
    if (config.as_rewards) std::swap(lo, hi);
    const char* what = p.average ? "gain" : "value";
    text << "support " << p.mdp.num_support() << " beliefs, " << what << " range [" << display(lo, config) << ", "
         << display(hi, config) << "], " << what << " at start " << display(at_start, config) << "\n";

    std::string body;
    if (config.format == "text") {
        body = text.str();
    } else if (config.format == "json") {
        Json payload;
        payload["mdp"] = to_json(p.mdp);
        payload["solution"] = p.average ? to_json(*p.average) : to_json(*p.discounted);
        payload["start_value"] = at_start;
        body = artifact("solve", payload, config).dump(2) + "\n";
    } else {
        std::ostringstream csv;
        write_csv_row(csv, {"index", "belief", p.average ? "gain" : "value", "bias", "action", "config"});
        for (Index c = 0; c < p.mdp.num_support(); ++c) {
            const double v = p.average ? p.average->gain(c) : p.discounted->values(c);
            const std::string bias = p.average ? format_number(p.average->bias(c)) : "";
            const int u = p.average ? p.average->policy[c] : p.discounted->greedy_policy[c];
            write_csv_row(csv, {std::to_string(c), join_belief(p.mdp.support[c]), format_number(v), bias,
                                std::to_string(u), config_cell(config)});
        }
        body = csv.str();
    }
    emit(config, out, body);
    if (!config.output.empty() && config.format != "text") out << text.str();
    return 0;
}

int cmd_bound(const RunConfig& config, std::ostream& out) {
    const Pipeline p = run_pipeline(config);
    const BoundReport r = run_bound(p, config);
    std::ostringstream text;
    text << std::setprecision(10) << "delta " << r.delta_hat << " (sampled, under-estimate of sup), upper bound "
         << display(r.upper_bound, config) << ", max gain " << display(r.max_gain, config) << ", seed " << r.seed
         << "\n";
    std::string body;
    if (config.format == "text") {
        body = text.str();
    } else if (config.format == "json") {
        body = artifact("bound", to_json(r), config).dump(2) + "\n";
    } else {
        std::ostringstream csv;
        write_csv_row(csv, {"delta_hat", "upper_bound", "max_gain", "samples", "seed", "config"});
        write_csv_row(csv, {format_number(r.delta_hat), format_number(r.upper_bound), format_number(r.max_gain),
                            std::to_string(r.samples), std::to_string(r.seed), config_cell(config)});
        body = csv.str();
    }
    emit(config, out, body);
    if (!config.output.empty() && config.format != "text") out << text.str();
    return 0;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
    const Pipeline p = run_pipeline(config);
    const SimulationReport r = run_simulation(p, config);
    std::ostringstream text;
    text << std::setprecision(10) << "policy " << r.policy << ": mean " << display(r.mean, config) << " +/- "
         << r.standard_error << " over " << r.averages.size() << " x " << r.horizon << " steps, seed " << r.seed
         << "\n";
    std::string body;
    if (config.format == "text") {
        body = text.str();
    } else if (config.format == "json") {
        body = artifact("simulation", to_json(r), config).dump(2) + "\n";
    } else {
        std::ostringstream csv;
        write_csv_row(csv, {"trajectory", "average", "policy", "seed", "config"});
        for (std::size_t i = 0; i < r.averages.size(); ++i)
            write_csv_row(csv, {std::to_string(i), format_number(r.averages[i]), r.policy, std::to_string(r.seed),
                                config_cell(config)});
        body = csv.str();
    }
    emit(config, out, body);
    if (!config.output.empty() && config.format != "text") out << text.str();
    return 0;
}

const std::vector<Table2Target>& table2_targets() {
    static const std::vector<Table2Target> targets{
        {"paint", "Paint", {Scheme::d2}, "3-E", Scheme::d1, "1-E", 160, -0.170, -0.052, -0.172, 0.03, 0.15},
        {"bridge", "Bridge", {Scheme::d2}, "0-E", Scheme::d2, "0-E", 1000, 241.798, 241.880, 241.700, 0.01, 1.0},
        {"shuttle", "Shuttle", {Scheme::d1, Scheme::d2}, "2-E", Scheme::d1, "2-E", 160, -1.842, -1.220, -1.835, 0.03,
         0.7},
    };
    return targets;
}

std::optional<fs::path> find_problem(const fs::path& dir, const std::string& key) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return std::nullopt;
    std::vector<fs::path> matches;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const std::string name = lower(entry.path().filename().string());
        if (entry.is_regular_file() && name.starts_with(key) && name.ends_with(".pomdp")) matches.push_back(entry.path());
    }
    if (matches.empty()) return std::nullopt;
    std::sort(matches.begin(), matches.end());
    return matches.front();
}

Table2Row run_table2_row(const Table2Target& target, const fs::path& file, const RunConfig& base) {
    Table2Row row;
    row.name = target.name;
    const PomdpModel model = parse_pomdp_file(file);
    const Belief x0 = model.start_belief();

    RunConfig config = base;
    config.problem = file.string();
    config.criterion = Criterion::average;
    config.alpha.reset();
    config.grid = target.lb_grid;
    row.lb_pass = row.ub_pass = true;
    for (Scheme scheme : target.lb_schemes) {
        config.scheme = scheme;
        const Pipeline p = run_pipeline(config, model);
        const double lb = extend_average_solution(p.model, p.mdp, *p.average, x0).gain;
        const BoundReport bound = run_bound(p, config);
        row.lb.emplace_back(scheme, lb);
        row.ub.emplace_back(scheme, bound.upper_bound);
        row.lb_pass = row.lb_pass && std::abs(lb - target.lb) <= target.lb_tol;
        row.ub_pass = row.ub_pass && lb <= bound.upper_bound && std::abs(bound.upper_bound - target.ub) <= target.ub_tol;
    }

    config.scheme = target.sim_scheme;
    config.grid = target.sim_grid;
    config.trajectories = target.trajectories;
    const Pipeline p = run_pipeline(config, model);
    const SimulationReport sim = run_simulation(p, config);
    row.sim_mean = sim.mean;
    row.sim_se = sim.standard_error;
    row.sim_pass = std::abs(sim.mean - target.sim) <= 3.0 * sim.standard_error;
    // A lower bound must not exceed what the simulated policy achieves beyond noise.
    for (const auto& [scheme, lb] : row.lb) row.lb_pass = row.lb_pass && lb <= sim.mean + 3.0 * sim.standard_error;
    return row;
}

int cmd_table2(const fs::path& dir, const RunConfig& base, std::ostream& out) {
    std::vector<Table2Row> rows;
    for (const auto& target : table2_targets()) {
        Table2Row row;
        row.name = target.name;
        const auto file = find_problem(dir, target.key);
        if (!file) {
            row.error = "no " + target.key + "*.POMDP file in " + dir.string();
        } else {
            try {
                row = run_table2_row(target, *file, base);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
        }
        rows.push_back(std::move(row));
    }

    bool all_ok = true;
    const auto scheme_list = [](const std::vector<std::pair<Scheme, double>>& values) {
        std::string s;
        for (const auto& [scheme, v] : values) s += (s.empty() ? "" : " ") + to_string(scheme) + "=" + format_number(v);
        return s;
    };
    std::ostringstream body;
    if (base.format == "json") {
        Json list = Json::array();
        for (const auto& r : rows) {
            Json j;
            j["problem"] = r.name;
            if (!r.error.empty()) {
                j["error"] = r.error;
            } else {
                for (const auto& [scheme, v] : r.lb) j["lb"][to_string(scheme)] = v;
                for (const auto& [scheme, v] : r.ub) j["ub"][to_string(scheme)] = v;
                j["sim_mean"] = r.sim_mean;
                j["sim_se"] = r.sim_se;
                j["pass"] = {{"lb", r.lb_pass}, {"ub", r.ub_pass}, {"sim", r.sim_pass}};
            }
            list.push_back(std::move(j));
        }
        body << artifact("table2", list, base).dump(2) << "\n";
    } else if (base.format == "csv") {
        write_csv_row(body, {"problem", "lb", "ub", "sim_mean", "sim_se", "lb_pass", "ub_pass", "sim_pass", "error",
                             "config"});
        for (const auto& r : rows)
            write_csv_row(body, {r.name, scheme_list(r.lb), scheme_list(r.ub), format_number(r.sim_mean),
                                 format_number(r.sim_se), r.lb_pass ? "1" : "0", r.ub_pass ? "1" : "0",
                                 r.sim_pass ? "1" : "0", r.error, config_cell(base)});
    } else {
        body << std::setprecision(6);
        for (const auto& r : rows) {
            if (!r.error.empty()) {
                body << r.name << ": ERROR " << r.error << "\n";
                continue;
            }
            body << r.name << ": LB";
            for (const auto& [scheme, v] : r.lb) body << " " << to_string(scheme) << "=" << display(v, base);
            body << (r.lb_pass ? " [pass]" : " [FAIL]") << "  N.UB";
            for (const auto& [scheme, v] : r.ub) body << " " << to_string(scheme) << "=" << display(v, base);
            body << (r.ub_pass ? " [pass]" : " [FAIL]") << "  S.Policy " << display(r.sim_mean, base) << " +/- "
                 << r.sim_se << (r.sim_pass ? " [pass]" : " [FAIL]") << "\n";
        }
    }
    for (const auto& r : rows) all_ok = all_ok && r.error.empty();
    emit(base, out, body.str());
    return all_ok ? 0 : 1;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Discretized lower approximations for average-cost POMDPs"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    RunConfig config;
    std::string scheme = "d2", criterion = "average";
    double alpha = 0.0;
    std::string table_dir = "data/problems";

    const auto add_common = [&](CLI::App* cmd, bool needs_problem) {
        auto* problem = cmd->add_option("--problem", config.problem, "Cassandra .POMDP file")->envname("DPOMDP_PROBLEM");
        if (needs_problem) problem->required();
        cmd->add_option("--scheme", scheme, "d1 or d2")->envname("DPOMDP_SCHEME")->capture_default_str();
        cmd->add_option("--grid", config.grid, "grid pattern, e.g. 3-E or 2-E+10-R")
            ->envname("DPOMDP_GRID")
            ->capture_default_str();
        cmd->add_option("--criterion", criterion, "average or discounted")
            ->envname("DPOMDP_CRITERION")
            ->capture_default_str();
        cmd->add_option("--alpha", alpha, "discount factor (discounted criterion)")->envname("DPOMDP_ALPHA");
        cmd->add_option("--order,-n", config.order, "discount-optimality order n >= -1")
            ->envname("DPOMDP_ORDER")
            ->capture_default_str();
        cmd->add_option("--tol", config.tol, "value-iteration tolerance")->envname("DPOMDP_TOL")->capture_default_str();
        cmd->add_option("--seed", config.seed, "root seed")->envname("DPOMDP_SEED")->capture_default_str();
        cmd->add_option("--trajectories", config.trajectories)->envname("DPOMDP_TRAJECTORIES")->capture_default_str();
        cmd->add_option("--horizon", config.horizon)->envname("DPOMDP_HORIZON")->capture_default_str();
        cmd->add_option("--samples", config.bound_samples, "random beliefs for bound estimation")
            ->envname("DPOMDP_SAMPLES")
            ->capture_default_str();
        cmd->add_option("--bootstrap", config.bootstrap, "bootstrap resamples")
            ->envname("DPOMDP_BOOTSTRAP")
            ->capture_default_str();
        cmd->add_option("--policy", config.policy, "step2 or lookahead")->envname("DPOMDP_POLICY")->capture_default_str();
        cmd->add_option("--format", config.format, "json, csv or text")->envname("DPOMDP_FORMAT")->capture_default_str();
        cmd->add_option("--output,-o", config.output, "write the artifact here instead of stdout")
            ->envname("DPOMDP_OUTPUT");
        cmd->add_flag("--as-rewards", config.as_rewards, "negate values in text output");
        cmd->add_option("--threads", config.threads, "simulation worker threads")
            ->envname("DPOMDP_THREADS")
            ->capture_default_str();
    };

    auto* solve = app.add_subcommand("solve", "solve the modified MDP");
    auto* bound = app.add_subcommand("bound", "sampled average-cost upper bound");
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo evaluation of the extracted policy");
    auto* table2 = app.add_subcommand("table2", "benchmark comparison over a problem directory");
    add_common(solve, true);
    add_common(bound, true);
    add_common(simulate, true);
    add_common(table2, false);
    table2->add_option("--dir", table_dir, "directory with the benchmark .POMDP files")
        ->envname("DPOMDP_PROBLEM_DIR")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        config.scheme = scheme_from_string(scheme);
        config.criterion = criterion_from_string(criterion);
        const auto parsed = app.get_subcommands();
        const bool alpha_given =
            std::any_of(parsed.begin(), parsed.end(), [](CLI::App* cmd) { return cmd->count("--alpha") > 0; });
        if (alpha_given) config.alpha = alpha;
        if (config.threads == 0) config.threads = std::max(1u, std::thread::hardware_concurrency());
        config.validate();
        if (solve->parsed()) return cmd_solve(config, out);
        if (bound->parsed()) return cmd_bound(config, out);
        if (simulate->parsed()) return cmd_simulate(config, out);
        return cmd_table2(table_dir, config, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace dpomdp::cli
