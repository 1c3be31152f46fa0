#include "colsched/assignment.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "colsched/bounds.hpp"

namespace colsched {

namespace {

NetworkConfig empty_channels(const AssignmentProblem& problem) {
    NetworkConfig config = problem.base;
    config.uncoop_rates.assign(static_cast<std::size_t>(std::max(0, config.num_channels())), 0.0);
    return config;
}

void require_valid_problem(const AssignmentProblem& problem) {
    auto violations = validate_problem(problem);
    if (!violations.empty()) throw ConfigError(std::move(violations));
}

// Users by descending rate, stable in the original index.
std::vector<int> placement_order(const AssignmentProblem& problem) {
    std::vector<int> order(problem.users.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return problem.users[a].rate > problem.users[b].rate; });
    return order;
}

}  // namespace

std::vector<std::string> validate_problem(const AssignmentProblem& problem) {
    std::vector<std::string> violations = validate_config(empty_channels(problem));
    const int m = problem.base.num_channels();
    if (static_cast<int>(problem.users.size()) > m) {
        violations.push_back(std::to_string(problem.users.size()) + " uncooperative users but only " +
                             std::to_string(m) + " channels");
    }
    for (std::size_t k = 0; k < problem.users.size(); ++k) {
        const UncoopUser& user = problem.users[k];
        const std::string id = "uncooperative user " + std::to_string(k + 1);
        if (!is_valid_rate(user.rate)) violations.push_back(id + " rate out of [0,1]");
        if (user.candidates.empty()) violations.push_back(id + " has no candidate channels");
        std::set<int> seen;
        for (int ch : user.candidates) {
            if (ch < 0 || ch >= m) violations.push_back(id + " names channel " + std::to_string(ch + 1) + " outside 1.." + std::to_string(m));
            if (!seen.insert(ch).second) violations.push_back(id + " repeats candidate channel " + std::to_string(ch + 1));
        }
    }
    return violations;
}

NetworkConfig apply_assignment(const AssignmentProblem& problem, const std::vector<int>& channel_of_user) {
    if (channel_of_user.size() != problem.users.size())
        throw std::invalid_argument("apply_assignment: one channel per uncooperative user expected");
    NetworkConfig config = empty_channels(problem);
    std::vector<bool> taken(config.uncoop_rates.size(), false);
    for (std::size_t k = 0; k < channel_of_user.size(); ++k) {
        const int ch = channel_of_user[k];
        const auto& cands = problem.users[k].candidates;
        if (std::find(cands.begin(), cands.end(), ch) == cands.end())
            throw std::invalid_argument("apply_assignment: channel outside the user's candidates");
        if (taken.at(ch)) throw std::invalid_argument("apply_assignment: channel used twice");
        taken[ch] = true;
        config.uncoop_rates[ch] = problem.users[k].rate;
    }
    return config;
}

AssignmentResult solve_exact(const AssignmentProblem& problem, const ExactOptions& options) {
    require_valid_problem(problem);
    const int m = problem.base.num_channels();
    if (m > options.enumeration_cap && !options.override_cap)
        throw SizeGuardError("exact assignment: " + std::to_string(m) + " channels exceeds the enumeration cap of " +
                             std::to_string(options.enumeration_cap));

    const NetworkConfig base = empty_channels(problem);
    const std::vector<int> order = placement_order(problem);
    std::vector<double> user_capacity;
    for (const UncoopUser& u : problem.users) user_capacity.push_back(lower_bound_throughput(u.rate));

    // Unplaced channels keep capacity 1 (= an empty channel), which bounds
    // whatever they end up with from above.
    std::vector<double> caps(static_cast<std::size_t>(m), 1.0);
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    std::vector<int> channel_of_user(problem.users.size(), -1);

    AssignmentResult result;
    auto routable = [&] { return check_feasibility(base, caps).feasible; };

    auto search = [&](auto&& self, std::size_t depth) -> bool {
        ++result.nodes_explored;
        if (depth == order.size()) {
            if (!routable()) return false;
            ++result.feasible_count;
            if (!result.feasible) {
                result.feasible = true;
                result.channel_of_user = channel_of_user;
            }
            return !options.count_all;
        }
        const int k = order[depth];
        std::vector<int> candidates = problem.users[k].candidates;
        std::sort(candidates.begin(), candidates.end());
        for (int ch : candidates) {
            if (taken[ch]) continue;
            taken[ch] = true;
            caps[ch] = user_capacity[k];
            channel_of_user[k] = ch;
            const bool stop = (!options.prune || routable()) && self(self, depth + 1);
            taken[ch] = false;
            caps[ch] = 1.0;
            channel_of_user[k] = -1;
            if (stop) return true;
        }
        return false;
    };
    search(search, 0);

    if (result.feasible) result.verdict = check_sufficient(apply_assignment(problem, result.channel_of_user));
    return result;
}

AssignmentResult solve_greedy(const AssignmentProblem& problem) {
    require_valid_problem(problem);
    const int m = problem.base.num_channels();
    const NetworkConfig base = empty_channels(problem);
    std::vector<double> caps(static_cast<std::size_t>(m), 1.0);
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    std::vector<int> channel_of_user(problem.users.size(), -1);

    AssignmentResult result;
    for (int k : placement_order(problem)) {
        const double capacity = lower_bound_throughput(problem.users[k].rate);
        std::vector<int> candidates = problem.users[k].candidates;
        std::sort(candidates.begin(), candidates.end());
        int best = -1;
        double best_slack = 0.0;
        for (int ch : candidates) {
            if (taken[ch]) continue;
            const double saved = caps[ch];
            caps[ch] = capacity;
            const double slack = check_feasibility(base, caps).slack;
            caps[ch] = saved;
            ++result.nodes_explored;
            if (best < 0 || slack > best_slack + 1e-12) {
                best = ch;
                best_slack = slack;
            }
        }
        if (best < 0) return result;  // every candidate channel already taken
        taken[best] = true;
        caps[best] = capacity;
        channel_of_user[k] = best;
    }

    result.channel_of_user = channel_of_user;
    result.verdict = check_sufficient(apply_assignment(problem, channel_of_user));
    result.feasible = result.verdict->feasible;
    return result;
}

std::vector<std::string> validate_set_cover(const SetCoverInstance& instance) {
    std::vector<std::string> violations;
    if (instance.num_elements < 1) violations.emplace_back("set cover needs at least one element");
    std::vector<bool> covered(static_cast<std::size_t>(std::max(0, instance.num_elements)), false);
    for (std::size_t s = 0; s < instance.subsets.size(); ++s) {
        for (int e : instance.subsets[s]) {
            if (e < 0 || e >= instance.num_elements)
                violations.push_back("subset " + std::to_string(s + 1) + " names unknown element " + std::to_string(e + 1));
            else
                covered[e] = true;
        }
    }
    for (std::size_t e = 0; e < covered.size(); ++e)
        if (!covered[e]) violations.push_back("element " + std::to_string(e + 1) + " is in no subset");
    if (instance.budget < 0 || instance.budget > static_cast<int>(instance.subsets.size()))
        violations.push_back("budget k must lie in 0..|S|");
    return violations;
}

AssignmentProblem reduce_set_cover(const SetCoverInstance& instance) {
    auto violations = validate_set_cover(instance);
    if (!violations.empty()) throw ConfigError(std::move(violations));

    const int num_elements = instance.num_elements;
    const int num_subsets = static_cast<int>(instance.subsets.size());
    AssignmentProblem problem;
    NetworkConfig& base = problem.base;
    base.topology.num_adaptive = num_elements;
    base.topology.num_channels = num_subsets;
    base.topology.access_sets.assign(num_elements, {});
    for (int s = 0; s < num_subsets; ++s) {
        std::set<int> members(instance.subsets[s].begin(), instance.subsets[s].end());
        for (int e : members) base.topology.access_sets[e].push_back(s);
    }
    base.adaptive_rates.assign(num_elements, 1.0 / num_elements);
    base.uncoop_rates.assign(num_subsets, 0.0);

    std::vector<int> all(num_subsets);
    std::iota(all.begin(), all.end(), 0);
    for (int k = 0; k < num_subsets - instance.budget; ++k) problem.users.push_back({1.0, all});
    for (int k = 0; k < instance.budget; ++k) problem.users.push_back({0.0, all});
    return problem;
}

}  // namespace colsched
