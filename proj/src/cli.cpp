#include "colsched/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include "colsched/assignment.hpp"
#include "colsched/bounds.hpp"
#include "colsched/io.hpp"
#include "colsched/simulator.hpp"
#include "colsched/stability.hpp"

namespace colsched {

namespace {

double parse_value(std::string_view token) {
    const std::string text(token);
    const auto slash = text.find('/');
    std::size_t used = 0;
    try {
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used == text.size()) return v;
        } else {
            const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
            std::size_t used_den = 0;
            const double a = std::stod(num, &used), b = std::stod(den, &used_den);
            if (used == num.size() && used_den == den.size() && b != 0.0) return a / b;
        }
    } catch (const std::exception&) {
    }
    throw std::invalid_argument("bad grid value '" + text + "'");
}

double round12(double x) { return std::round(x * 1e12) / 1e12; }

// Round-trips through the printed form so JSON summaries carry the same
// 12 significant digits as the CSV files.
double printed(double x) { return std::isfinite(x) ? std::strtod(format_number(x).c_str(), nullptr) : x; }

std::string provenance(const std::string& command, const std::string& args, std::uint64_t hash, std::uint64_t seed) {
    return "# colsched " + command + " " + args + " input_hash=" + hex64(hash) + " seed=" + std::to_string(seed) +
           "\n";
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) out += (k ? "," : "") + format_number(values[k]);
    return out;
}

// ---- bounds ----------------------------------------------------------------

struct BoundsArgs {
    std::string grid;
    std::string out;
    int y_cap = kDefaultYCap;
    int jobs = 1;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
    const std::vector<double> grid = parse_grid(a.grid);
    for (double v : grid)
        if (!is_valid_rate(v)) throw std::invalid_argument("grid value " + format_number(v) + " outside [0,1]");
    if (a.y_cap < 1) throw std::invalid_argument("--y-cap must be positive");

    // Grid points are independent; workers fill disjoint slots and rows are
    // written in grid order.
    std::vector<BoundsResult> rows(grid.size());
    const std::size_t jobs = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, a.jobs)), 1, std::max<std::size_t>(1, grid.size()));
    std::vector<std::exception_ptr> failures(jobs);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
        workers.emplace_back([&, w] {
            try {
                for (std::size_t k = w; k < grid.size(); k += jobs) rows[k] = compute_bounds(Rate(grid[k]), a.y_cap);
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);

    const std::string canonical = "--grid " + a.grid + " --y-cap " + std::to_string(a.y_cap);
    std::string text = provenance("bounds", canonical, fnv1a64(join_numbers(grid)), 0);
    text += "lambda,mu_lb,p_star,sigma_star,y_star,mu_ub\n";
    for (const BoundsResult& r : rows) {
        text += format_number(r.lambda) + "," + format_number(r.mu_lb) + "," + format_number(r.p_star) + "," +
                format_number(r.sigma_star) + "," + (r.y_star ? std::to_string(*r.y_star) : "") + "," +
                format_number(r.mu_ub) + "\n";
    }
    write_file(a.out, text);
    out << "wrote " << rows.size() << " rows to " << a.out << "\n";
    return exit_code::ok;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string policy;
    std::optional<std::int64_t> horizon;
    std::optional<std::uint64_t> seed;
    std::int64_t sample_every = 1000;
    std::string out;
};

Json summary_json(const NetworkConfig& config, PolicyKind policy, const SimMetrics& m) {
    auto rounded = [](std::vector<double> v) {
        for (double& x : v) x = printed(x);
        return v;
    };
    std::vector<double> throughput, growth, uncoop_growth;
    for (int i = 0; i < config.num_adaptive(); ++i) {
        throughput.push_back(m.throughput(i));
        growth.push_back(m.backlog_growth(i));
    }
    for (int j = 0; j < config.num_channels(); ++j) uncoop_growth.push_back(m.uncoop_backlog_growth(j));

    Json doc;
    doc["policy"] = std::string(to_string(policy));
    doc["horizon"] = m.horizon;
    doc["seed"] = config.seed;
    doc["config"] = config_to_json(config);
    doc["throughput"] = rounded(throughput);
    doc["backlog_growth"] = rounded(growth);
    doc["max_backlog_growth"] = printed(m.max_backlog_growth());
    doc["uncoop_backlog_growth"] = rounded(uncoop_growth);
    doc["collision_fraction"] = printed(m.collision_fraction());
    doc["collisions"] = m.collisions;
    doc["idles"] = m.idles;
    doc["adaptive_successes"] = m.adaptive_successes;
    doc["dummy_successes"] = m.dummy_successes;
    doc["uncoop_successes"] = m.uncoop_successes;
    doc["final_adaptive_backlog"] = m.final_adaptive_backlog;
    doc["final_uncoop_backlog"] = m.final_uncoop_backlog;
    return doc;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto policy = parse_policy(a.policy);
    if (!policy) throw std::invalid_argument("unknown policy '" + a.policy + "' (pi_lb, randomized, lqf, priority)");
    NetworkConfig config = parse_config(read_file(a.config));
    if (a.horizon) config.horizon = *a.horizon;
    if (a.seed) config.seed = *a.seed;
    require_valid(config);
    if (a.sample_every < 1) throw std::invalid_argument("--sample-every must be at least 1");

    SimOptions options;
    options.policy = *policy;
    options.horizon = config.horizon;
    options.seed = config.seed;
    options.sample_every = a.sample_every;
    const SimMetrics metrics = run_simulation(config, options);

    const std::string resolved = config_to_json(config).dump();
    const std::string canonical = "--policy " + std::string(to_string(*policy)) + " --horizon " +
                                  std::to_string(config.horizon) + " --seed " + std::to_string(config.seed) +
                                  " --sample-every " + std::to_string(a.sample_every) + " config=" + resolved;
    const std::string header = provenance("simulate", canonical, fnv1a64(resolved), config.seed);

    std::string csv = header + "slot,sum_backlog";
    for (int i = 1; i <= config.num_adaptive(); ++i) csv += ",user_" + std::to_string(i);
    csv += ",cum_collisions\n";
    for (const BacklogSample& s : metrics.samples) {
        csv += std::to_string(s.slot) + "," + std::to_string(s.sum_backlog);
        for (std::int64_t q : s.per_user) csv += "," + std::to_string(q);
        csv += "," + std::to_string(s.cum_collisions) + "\n";
    }
    write_file(a.out, csv);
    const std::string summary_path = a.out + ".summary.json";
    write_file(summary_path, header + summary_json(config, *policy, metrics).dump(2) + "\n");

    out << "max Q(T)/T = " << format_number(metrics.max_backlog_growth())
        << ", collision fraction = " << format_number(metrics.collision_fraction()) << "\n"
        << "wrote " << a.out << " and " << summary_path << "\n";
    return exit_code::ok;
}

// ---- region ----------------------------------------------------------------

struct RegionArgs {
    std::string config;
    std::string axis = "all";
    double step = 0.05;
    std::string mode = "symmetric";
    double max_rate = 1.0;
    std::string out;
};

std::vector<int> parse_axis(const std::string& spec, int num_adaptive) {
    std::vector<int> users;
    if (spec == "all") {
        for (int i = 0; i < num_adaptive; ++i) users.push_back(i);
        return users;
    }
    std::stringstream in(spec);
    std::string token;
    while (std::getline(in, token, ',')) {
        std::size_t used = 0;
        int id = 0;
        try {
            id = std::stoi(token, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != token.size() || id < 1 || id > num_adaptive)
            throw std::invalid_argument("bad --axis entry '" + token + "' (users are 1.." + std::to_string(num_adaptive) + ")");
        users.push_back(id - 1);
    }
    if (users.empty()) throw std::invalid_argument("--axis names no users");
    return users;
}

int cmd_region(const RegionArgs& a, std::ostream& out) {
    const NetworkConfig config = parse_config(read_file(a.config));
    require_valid(config);
    SweepOptions options;
    options.step = a.step;
    options.max_rate = a.max_rate;
    if (a.mode == "symmetric")
        options.mode = SweepMode::Symmetric;
    else if (a.mode == "grid")
        options.mode = SweepMode::Grid;
    else
        throw std::invalid_argument("unknown --mode '" + a.mode + "' (symmetric, grid)");
    const std::vector<int> axis = parse_axis(a.axis, config.num_adaptive());
    const std::vector<RegionRow> rows = sweep_region(config, axis, options);

    const std::string resolved = config_to_json(config).dump();
    const std::string canonical = "--axis " + a.axis + " --step " + format_number(a.step) + " --mode " + a.mode +
                                  " --max-rate " + format_number(a.max_rate) + " config=" + resolved;
    std::string csv = provenance("region", canonical, fnv1a64(resolved), config.seed);
    for (int i = 1; i <= config.num_adaptive(); ++i) csv += "rate_" + std::to_string(i) + ",";
    csv += "sufficient,necessary\n";
    for (const RegionRow& r : rows)
        csv += join_numbers(r.rates) + "," + (r.sufficient ? "1" : "0") + "," + (r.necessary ? "1" : "0") + "\n";
    write_file(a.out, csv);

    if (options.mode == SweepMode::Symmetric) {
        for (auto [bound, name] : {std::pair{ChannelBound::Lower, "sufficient"}, std::pair{ChannelBound::Upper, "necessary"}}) {
            if (const auto b = symmetric_boundary(rows, axis.front(), bound))
                out << name << " boundary between " << format_number(b->inside) << " and " << format_number(b->outside) << "\n";
        }
    }
    out << "wrote " << rows.size() << " rows to " << a.out << "\n";
    return exit_code::ok;
}

// ---- assign ----------------------------------------------------------------

struct AssignArgs {
    std::string problem;
    std::string mode;
    std::string out;
    int enumeration_cap = 12;
    bool override_cap = false;
};

int cmd_assign(const AssignArgs& a, std::ostream& out) {
    if (a.mode != "exact" && a.mode != "greedy")
        throw std::invalid_argument("unknown --mode '" + a.mode + "' (exact, greedy)");
    const AssignmentProblem problem = parse_problem(read_file(a.problem));
    if (auto violations = validate_problem(problem); !violations.empty()) throw ConfigError(std::move(violations));

    const auto start = std::chrono::steady_clock::now();
    const AssignmentResult result = [&] {
        if (a.mode == "greedy") return solve_greedy(problem);
        ExactOptions options;
        options.enumeration_cap = a.enumeration_cap;
        options.override_cap = a.override_cap;
        return solve_exact(problem, options);
    }();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    Json report;
    report["mode"] = a.mode;
    report["feasible"] = result.feasible;
    Json placement = Json::array();
    for (std::size_t k = 0; k < result.channel_of_user.size(); ++k) {
        Json entry;
        entry["uncoop_user"] = k + 1;
        entry["rate"] = printed(problem.users[k].rate);
        entry["channel"] = result.channel_of_user[k] + 1;
        placement.push_back(entry);
    }
    report["assignment"] = placement;
    if (result.verdict) {
        report["max_flow"] = printed(result.verdict->max_flow);
        report["slack"] = printed(result.verdict->slack);
    }
    report["nodes_explored"] = result.nodes_explored;
    report["problem"] = problem_to_json(problem);

    const std::string resolved = problem_to_json(problem).dump();
    std::string canonical = "--mode " + a.mode;
    if (a.mode == "exact")
        canonical += " --enumeration-cap " + std::to_string(a.enumeration_cap) + (a.override_cap ? " --override-cap" : "");
    write_file(a.out, provenance("assign", canonical, fnv1a64(resolved), 0) + report.dump(2) + "\n");

    out << (result.feasible ? "feasible" : "infeasible") << ", " << result.nodes_explored << " nodes, "
        << format_number(seconds) << " s\n"
        << "wrote " << a.out << "\n";
    return exit_code::ok;
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
    std::vector<double> grid;
    if (spec.empty()) return grid;
    const std::string text(spec);
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream in(text);
        for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw std::invalid_argument("grid range must be a:b:step");
        const double a = parse_value(parts[0]), b = parse_value(parts[1]), step = parse_value(parts[2]);
        if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
        for (std::int64_t k = 0;; ++k) {
            const double v = round12(a + static_cast<double>(k) * step);
            if (v > b + 1e-12) break;
            grid.push_back(v);
        }
        return grid;
    }
    std::stringstream in(text);
    for (std::string token; std::getline(in, token, ',');) grid.push_back(parse_value(token));
    return grid;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Scheduling analysis for collision channels shared with uncooperative users", "colsched"};
    app.require_subcommand(1);

    BoundsArgs bounds;
    auto* bounds_cmd = app.add_subcommand("bounds", "Throughput bounds over a grid of uncooperative rates");
    bounds_cmd->add_option("--grid", bounds.grid, "a:b:step or comma list of rates")->required();
    bounds_cmd->add_option("--out", bounds.out, "Output CSV")->required();
    bounds_cmd->add_option("--y-cap", bounds.y_cap, "Largest threshold searched");
    bounds_cmd->add_option("--jobs", bounds.jobs, "Worker threads");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate a network under one policy");
    sim_cmd->add_option("--config", sim.config, "Network config file")->required();
    sim_cmd->add_option("--policy", sim.policy, "pi_lb, randomized, lqf or priority")->required();
    sim_cmd->add_option("--horizon", sim.horizon, "Slots (overrides the config)");
    sim_cmd->add_option("--seed", sim.seed, "Master seed (overrides the config)");
    sim_cmd->add_option("--sample-every", sim.sample_every, "Backlog sampling period");
    sim_cmd->add_option("--out", sim.out, "Output CSV; the summary goes to OUT.summary.json")->required();

    RegionArgs region;
    auto* region_cmd = app.add_subcommand("region", "Sweep adaptive rates against the stability conditions");
    region_cmd->add_option("--config", region.config, "Network config file")->required();
    region_cmd->add_option("--axis", region.axis, "all or comma list of adaptive users");
    region_cmd->add_option("--step", region.step, "Rate step in (0, 0.5]");
    region_cmd->add_option("--mode", region.mode, "symmetric or grid");
    region_cmd->add_option("--max-rate", region.max_rate, "Largest swept rate");
    region_cmd->add_option("--out", region.out, "Output CSV")->required();

    AssignArgs assign;
    auto* assign_cmd = app.add_subcommand("assign", "Place uncooperative users on channels");
    assign_cmd->add_option("--problem", assign.problem, "Problem file")->required();
    assign_cmd->add_option("--mode", assign.mode, "exact or greedy")->required();
    assign_cmd->add_option("--out", assign.out, "Output report")->required();
    assign_cmd->add_option("--enumeration-cap", assign.enumeration_cap, "Largest channel count for exact search");
    assign_cmd->add_flag("--override-cap", assign.override_cap, "Run exact search beyond the cap");

    // CLI11 consumes arguments from the back.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid;
    }

    try {
        if (bounds_cmd->parsed()) return cmd_bounds(bounds, out);
        if (sim_cmd->parsed()) return cmd_simulate(sim, out);
        if (region_cmd->parsed()) return cmd_region(region, out);
        return cmd_assign(assign, out);
    } catch (const ConfigError& e) {
        err << "invalid configuration:\n";
        for (const std::string& v : e.violations()) err << "  - " << v << "\n";
        return exit_code::invalid;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::io;
    } catch (const SizeGuardError& e) {
        err << "error: " << e.what() << " (pass --override-cap to force)\n";
        return exit_code::size_guard;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::invalid;
    }
}

int run_cli(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace colsched
