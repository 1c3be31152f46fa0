#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colsched/core.hpp"
#include "colsched/rng.hpp"
#include "colsched/stability.hpp"

namespace colsched {

/// Per-channel access gate: never transmit right after a collision,
/// otherwise transmit with probability `transmit_prob`.
struct ChannelGateState {
    double transmit_prob = 1.0;
    /// True iff the last feedback on this channel was a collision.
    bool backing_off = false;
};

struct GateDecision {
    Action action = Action::NoTransmit;
    ChannelGateState state;
};

GateDecision gate_decide(ChannelGateState state, TernaryFeedback last_feedback, RandomStream& rng);

/// Optional adaptive user per channel for one slot.
struct ScheduleAssignment {
    std::vector<std::optional<int>> user_for_channel;

    explicit ScheduleAssignment(int num_channels = 0) : user_for_channel(static_cast<std::size_t>(num_channels)) {}
    int num_channels() const { return static_cast<int>(user_for_channel.size()); }
    /// Number of channels assigned to `user`.
    int load(int user) const;
};

/// A feasible rho for the sufficient conditions, or nullopt.
std::optional<RhoMatrix> compute_rho(const NetworkConfig& config);

/// Each open channel j goes to eligible user i with probability
/// rho(i,j) / sum_k rho(k,j); channels whose column sums to zero stay idle.
ScheduleAssignment schedule_randomized(const RhoMatrix& rho, const NetworkTopology& topology,
                                       const std::vector<bool>& gates_open, RandomStream& rng);

/// Each open channel, in ascending order, goes to the eligible user with the
/// largest slot-start backlog; ties go to the lowest index.
ScheduleAssignment schedule_lqf(std::span<const std::int64_t> adaptive_queues, const NetworkTopology& topology,
                                const std::vector<bool>& gates_open);

/// Fixed priority by user index. A channel goes to the lowest-index eligible
/// user that still has an unassigned packet this slot.
ScheduleAssignment schedule_priority(std::span<const std::int64_t> adaptive_queues, const NetworkTopology& topology,
                                     const std::vector<bool>& gates_open);

/// Each open channel goes to its lowest-index eligible user whether or not
/// that user has data; this is the saturated single-user policy.
ScheduleAssignment schedule_first_eligible(const NetworkTopology& topology, const std::vector<bool>& gates_open);

enum class PolicyKind { PiLb, Randomized, Lqf, Priority };

std::string_view to_string(PolicyKind kind);
/// Accepts `pi_lb`, `randomized`, `lqf`, `priority`.
std::optional<PolicyKind> parse_policy(std::string_view name);

/// What a controller is allowed to see at the start of a slot. Uncooperative
/// backlogs are deliberately absent.
struct ControllerView {
    std::span<const std::int64_t> adaptive_queues;
    std::span<const TernaryFeedback> last_feedback;
};

/// Gates on every channel plus one scheduler. Owns the gate state and the
/// gate/scheduler random streams of a single run.
class Controller {
public:
    /// `gate_probs` overrides the per-channel transmit probability; by
    /// default channel j uses p*(uncoop rate of j).
    Controller(const NetworkConfig& config, PolicyKind kind, std::uint64_t seed,
               std::optional<std::vector<double>> gate_probs = std::nullopt);

    ScheduleAssignment decide(const ControllerView& view);

    PolicyKind kind() const { return kind_; }
    const std::vector<ChannelGateState>& gates() const { return gates_; }
    const RhoMatrix& rho() const { return rho_; }

private:
    NetworkTopology topology_;
    PolicyKind kind_;
    std::vector<ChannelGateState> gates_;
    std::vector<RandomStream> gate_rngs_;
    RandomStream scheduler_rng_;
    RhoMatrix rho_;
    std::vector<bool> open_;
};

}  // namespace colsched
