#include "colsched/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "colsched/bounds.hpp"

namespace colsched {

FlowNetwork::FlowNetwork(int num_nodes, int source, int sink)
    : num_nodes_(num_nodes), source_(source), sink_(sink) {
    if (num_nodes < 2 || source < 0 || sink < 0 || source >= num_nodes || sink >= num_nodes || source == sink)
        throw std::invalid_argument("FlowNetwork: bad node layout");
}

int FlowNetwork::add_edge(int from, int to, double capacity) {
    if (from < 0 || to < 0 || from >= num_nodes_ || to >= num_nodes_)
        throw std::invalid_argument("FlowNetwork: edge endpoint out of range");
    if (!(capacity >= 0.0)) throw std::invalid_argument("FlowNetwork: negative capacity");
    edges_.push_back({from, to, capacity});
    return static_cast<int>(edges_.size()) - 1;
}

FlowNetwork FlowNetwork::bipartite(const NetworkConfig& config, std::span<const double> channel_capacity) {
    const int n = config.num_adaptive();
    const int m = config.num_channels();
    if (static_cast<int>(channel_capacity.size()) != m)
        throw std::invalid_argument("FlowNetwork::bipartite: one capacity per channel expected");
    FlowNetwork net(n + m + 2, 0, n + m + 1);
    for (int i = 0; i < n; ++i) net.add_edge(net.source(), user_node(i), config.adaptive_rates[i]);
    for (int i = 0; i < n; ++i)
        for (int j : config.topology.access_sets[i]) net.add_edge(user_node(i), channel_node(config, j), 1.0);
    for (int j = 0; j < m; ++j) net.add_edge(channel_node(config, j), net.sink(), channel_capacity[j]);
    return net;
}

MaxFlowResult max_flow(const FlowNetwork& network) {
    // Residual arcs come in pairs: 2e is edge e, 2e+1 its reverse.
    constexpr double kResidualEps = 1e-14;
    const auto& edges = network.edges();
    std::vector<double> residual(2 * edges.size());
    std::vector<std::vector<int>> adjacency(network.num_nodes());
    for (std::size_t e = 0; e < edges.size(); ++e) {
        residual[2 * e] = edges[e].capacity;
        residual[2 * e + 1] = 0.0;
        adjacency[edges[e].from].push_back(static_cast<int>(2 * e));
        adjacency[edges[e].to].push_back(static_cast<int>(2 * e + 1));
    }
    auto head = [&](int arc) { return arc % 2 == 0 ? edges[arc / 2].to : edges[arc / 2].from; };

    std::vector<int> parent_arc(network.num_nodes());
    while (true) {
        std::fill(parent_arc.begin(), parent_arc.end(), -1);
        std::queue<int> frontier;
        frontier.push(network.source());
        parent_arc[network.source()] = -2;
        while (!frontier.empty() && parent_arc[network.sink()] == -1) {
            const int u = frontier.front();
            frontier.pop();
            for (int arc : adjacency[u]) {
                const int v = head(arc);
                if (parent_arc[v] == -1 && residual[arc] > kResidualEps) {
                    parent_arc[v] = arc;
                    frontier.push(v);
                }
            }
        }
        if (parent_arc[network.sink()] == -1) break;

        double push = std::numeric_limits<double>::infinity();
        for (int v = network.sink(); v != network.source(); v = head(parent_arc[v] ^ 1))
            push = std::min(push, residual[parent_arc[v]]);
        for (int v = network.sink(); v != network.source(); v = head(parent_arc[v] ^ 1)) {
            residual[parent_arc[v]] -= push;
            residual[parent_arc[v] ^ 1] += push;
        }
    }

    MaxFlowResult result;
    result.edge_flows.resize(edges.size());
    for (std::size_t e = 0; e < edges.size(); ++e)
        result.edge_flows[e] = std::clamp(residual[2 * e + 1], 0.0, edges[e].capacity);
    result.value = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (edges[e].from == network.source()) result.value += result.edge_flows[e];
        if (edges[e].to == network.source()) result.value -= result.edge_flows[e];
    }
    return result;
}

std::vector<double> channel_capacities(const NetworkConfig& config, ChannelBound bound) {
    std::vector<double> caps;
    caps.reserve(config.uncoop_rates.size());
    for (double rate : config.uncoop_rates)
        caps.push_back(bound == ChannelBound::Lower ? lower_bound_throughput(rate) : upper_bound_throughput(rate));
    return caps;
}

FeasibilityVerdict check_feasibility(const NetworkConfig& config, std::span<const double> channel_capacity) {
    require_valid(config);
    const FlowNetwork net = FlowNetwork::bipartite(config, channel_capacity);
    const MaxFlowResult flow = max_flow(net);

    FeasibilityVerdict verdict;
    verdict.rho = RhoMatrix::Zero(config.num_adaptive(), config.num_channels());
    for (std::size_t e = 0; e < net.edges().size(); ++e) {
        const auto& edge = net.edges()[e];
        if (edge.from == net.source() || edge.to == net.sink()) continue;
        const int user = edge.from - FlowNetwork::user_node(0);
        const int channel = edge.to - FlowNetwork::channel_node(config, 0);
        verdict.rho(user, channel) = flow.edge_flows[e];
    }
    const double demand = std::accumulate(config.adaptive_rates.begin(), config.adaptive_rates.end(), 0.0);
    verdict.max_flow = flow.value;
    verdict.slack = flow.value - demand;
    verdict.feasible = std::abs(verdict.slack) <= kFeasibilityTolerance;
    return verdict;
}

FeasibilityVerdict check_sufficient(const NetworkConfig& config) {
    require_valid(config);
    const auto caps = channel_capacities(config, ChannelBound::Lower);
    return check_feasibility(config, caps);
}

FeasibilityVerdict check_necessary(const NetworkConfig& config) {
    require_valid(config);
    const auto caps = channel_capacities(config, ChannelBound::Upper);
    return check_feasibility(config, caps);
}

bool satisfies_rate_constraints(const RhoMatrix& rho, const NetworkConfig& config,
                                std::span<const double> channel_capacity, double tol) {
    const int n = config.num_adaptive();
    const int m = config.num_channels();
    if (rho.rows() != n || rho.cols() != m) return false;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            const double r = rho(i, j);
            if (r < -tol || r > 1.0 + tol) return false;
            if (!config.topology.can_access(i, j) && std::abs(r) > tol) return false;
        }
        if (rho.row(i).sum() < config.adaptive_rates[i] - tol) return false;
    }
    for (int j = 0; j < m; ++j)
        if (rho.col(j).sum() > channel_capacity[j] + tol) return false;
    return true;
}

std::vector<double> rate_grid(double step, double max_rate) {
    if (!(step > 0.0 && step <= 0.5)) throw std::invalid_argument("sweep step must lie in (0, 0.5]");
    if (!(max_rate >= 0.0 && max_rate <= 1.0)) throw std::invalid_argument("sweep max_rate must lie in [0, 1]");
    std::vector<double> grid;
    for (long k = 0;; ++k) {
        const double value = std::round(k * step * 1e12) / 1e12;
        if (value > max_rate + 1e-12) break;
        grid.push_back(value);
    }
    return grid;
}

std::vector<RegionRow> sweep_region(const NetworkConfig& config, const std::vector<int>& axis_users,
                                    const SweepOptions& options) {
    require_valid(config);
    for (int user : axis_users)
        if (user < 0 || user >= config.num_adaptive())
            throw std::invalid_argument("sweep axis names an unknown adaptive user");
    const std::vector<double> grid = rate_grid(options.step, options.max_rate);
    const auto lower = channel_capacities(config, ChannelBound::Lower);
    const auto upper = channel_capacities(config, ChannelBound::Upper);

    std::vector<RegionRow> rows;
    auto evaluate = [&](NetworkConfig point) {
        RegionRow row;
        row.rates = point.adaptive_rates;
        row.sufficient = check_feasibility(point, lower).feasible;
        row.necessary = check_feasibility(point, upper).feasible;
        rows.push_back(std::move(row));
    };

    if (options.mode == SweepMode::Symmetric || axis_users.empty()) {
        for (double rate : grid) {
            NetworkConfig point = config;
            for (int user : axis_users) point.adaptive_rates[user] = rate;
            evaluate(std::move(point));
            if (axis_users.empty()) break;
        }
        return rows;
    }

    double total = 1.0;
    for (std::size_t k = 0; k < axis_users.size(); ++k) total *= static_cast<double>(grid.size());
    if (total > static_cast<double>(options.max_rows))
        throw std::invalid_argument("grid sweep exceeds max_rows");

    // Odometer over the axis users; the last axis varies fastest.
    std::vector<std::size_t> digit(axis_users.size(), 0);
    while (true) {
        NetworkConfig point = config;
        for (std::size_t k = 0; k < axis_users.size(); ++k) point.adaptive_rates[axis_users[k]] = grid[digit[k]];
        evaluate(std::move(point));
        std::size_t k = axis_users.size();
        while (k > 0 && ++digit[k - 1] == grid.size()) digit[--k] = 0;
        if (k == 0) break;
    }
    return rows;
}

std::optional<Bracket> symmetric_boundary(const std::vector<RegionRow>& rows, int axis_user, ChannelBound bound) {
    auto verdict = [&](const RegionRow& row) { return bound == ChannelBound::Lower ? row.sufficient : row.necessary; };
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (verdict(rows[k - 1]) && !verdict(rows[k]))
            return Bracket{rows[k - 1].rates[axis_user], rows[k].rates[axis_user]};
    return std::nullopt;
}

}  // namespace colsched
