#pragma once

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

#include "colsched/core.hpp"

namespace colsched {

/// rho(i, j): share of channel j's service given to adaptive user i.
/// Entries with j outside J(i) are zero.
using RhoMatrix = Eigen::MatrixXd;

struct FlowEdge {
    int from = 0;
    int to = 0;
    double capacity = 0.0;
};

class FlowNetwork {
public:
    FlowNetwork(int num_nodes, int source, int sink);

    /// Source -> user i (capacity = arrival rate), user i -> channel j for
    /// j in J(i) (capacity 1), channel j -> sink (capacity = channel rate).
    static FlowNetwork bipartite(const NetworkConfig& config, std::span<const double> channel_capacity);

    int add_edge(int from, int to, double capacity);

    int num_nodes() const { return num_nodes_; }
    int source() const { return source_; }
    int sink() const { return sink_; }
    const std::vector<FlowEdge>& edges() const { return edges_; }

    // Node layout of bipartite().
    static int user_node(int user) { return 1 + user; }
    static int channel_node(const NetworkConfig& config, int channel) { return 1 + config.num_adaptive() + channel; }

private:
    int num_nodes_;
    int source_;
    int sink_;
    std::vector<FlowEdge> edges_;
};

struct MaxFlowResult {
    double value = 0.0;
    /// Flow on each edge, in the order of FlowNetwork::edges().
    std::vector<double> edge_flows;
};

/// Shortest-augmenting-path (Edmonds-Karp) max flow on real capacities.
MaxFlowResult max_flow(const FlowNetwork& network);

inline constexpr double kFeasibilityTolerance = 1e-9;

enum class ChannelBound { Lower, Upper };

/// mu_lb or mu_ub of each channel's uncooperative rate.
std::vector<double> channel_capacities(const NetworkConfig& config, ChannelBound bound);

struct FeasibilityVerdict {
    bool feasible = false;
    /// User-to-channel flows of the maximum flow. When feasible this meets
    /// every rate constraint; otherwise it is the best partial split.
    RhoMatrix rho;
    double max_flow = 0.0;
    /// max_flow - sum of adaptive rates (<= 0).
    double slack = 0.0;
};

FeasibilityVerdict check_feasibility(const NetworkConfig& config, std::span<const double> channel_capacity);

/// Rates are within the region guaranteed by the randomized policy.
FeasibilityVerdict check_sufficient(const NetworkConfig& config);
/// Rates are outside the region no policy can reach.
FeasibilityVerdict check_necessary(const NetworkConfig& config);

/// Direct check of the per-user demand and per-channel capacity
/// inequalities for a given rho, with tolerance `tol`.
bool satisfies_rate_constraints(const RhoMatrix& rho, const NetworkConfig& config,
                                std::span<const double> channel_capacity,
                                double tol = kFeasibilityTolerance);

enum class SweepMode {
    Symmetric,  // all axis users share one rate
    Grid,       // Cartesian product over the axis users
};

struct RegionRow {
    std::vector<double> rates;  // every adaptive user's rate
    bool sufficient = false;
    bool necessary = false;
};

struct SweepOptions {
    double step = 0.05;
    double max_rate = 1.0;
    SweepMode mode = SweepMode::Symmetric;
    /// Grid sweeps larger than this many rows are rejected.
    std::size_t max_rows = 1'000'000;
};

/// Rate grid 0, step, 2*step, ... <= max_rate, rounded to 12 decimals.
std::vector<double> rate_grid(double step, double max_rate);

/// Sweeps the rates of `axis_users` (0-based) on the template config, other
/// users keep their template rates. Throws std::invalid_argument for a step
/// outside (0, 0.5] or an unknown user.
std::vector<RegionRow> sweep_region(const NetworkConfig& config, const std::vector<int>& axis_users,
                                    const SweepOptions& options);

struct Bracket {
    double inside = 0.0;   // last grid rate meeting the condition
    double outside = 0.0;  // first grid rate failing it
};

/// For a symmetric sweep: the consecutive grid rates where the chosen
/// verdict turns from feasible to infeasible, if it does.
std::optional<Bracket> symmetric_boundary(const std::vector<RegionRow>& rows, int axis_user, ChannelBound bound);

}  // namespace colsched
